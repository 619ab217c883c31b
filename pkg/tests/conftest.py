import pytest

from tepmon import pca, synth, timeseries


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    synth.write_dataset(d)
    return d


@pytest.fixture(scope="session")
def normal_series(data_dir):
    return timeseries.load_timeseries(data_dir / "fault_0.csv", 0)


@pytest.fixture(scope="session")
def model(normal_series):
    return pca.fit_from_timeseries(normal_series, 0.90, 0.01)


@pytest.fixture(scope="session")
def fault_series(data_dir):
    def load(fault_id):
        return timeseries.load_timeseries(data_dir / f"fault_{fault_id}.csv", fault_id)

    return load
