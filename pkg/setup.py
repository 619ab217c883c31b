"""Build script: compiles the Cython kernel extension when a toolchain is
available; the package falls back to the pure implementation otherwise."""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "tepmon._kernels._native",
                ["src/tepmon/_kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
