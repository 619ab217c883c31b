"""Command-line entry points: dataset generation, model fitting, the
monitoring service, and the offline evaluation harness."""

from __future__ import annotations

import argparse
import sys

from . import evalharness, explainer, pca, synth
from .llm import HttpChatBackend, StubBackend
from .service import ServiceConfig
from .timeseries import load_timeseries


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tepmon")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-data", help="write the surrogate dataset")
    p_gen.add_argument("--data-dir", default="data")
    p_gen.add_argument("--seed", type=int, default=synth.DEFAULT_SEED)

    p_fit = sub.add_parser("fit", help="fit the monitoring model on fault_0")
    p_fit.add_argument("--data-dir", default="data")
    p_fit.add_argument("--alpha", type=float, default=0.01)
    p_fit.add_argument("--variance", type=float, default=0.90)
    p_fit.add_argument("--out", default="model.json")

    p_serve = sub.add_parser("serve", help="run the monitoring service")
    p_serve.add_argument("--config", default=None)
    p_serve.add_argument("--model", default=None)
    p_serve.add_argument("--fit", action="store_true")
    p_serve.add_argument("--data-dir", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--backend-url", default=None)
    p_serve.add_argument("--backend-model", default=None)

    p_eval = sub.add_parser("eval", help="offline evaluation")
    eval_sub = p_eval.add_subparsers(dest="eval_command", required=True)

    p_detect = eval_sub.add_parser("detect")
    p_detect.add_argument("--data-dir", default="data")
    p_detect.add_argument("--alpha", type=float, default=0.01)
    p_detect.add_argument("--variance", type=float, default=0.90)
    p_detect.add_argument("--k", type=int, default=6)
    p_detect.add_argument("--consecutive", type=int, default=6)
    p_detect.add_argument("--out", default=None)

    p_diag = eval_sub.add_parser("diagnose")
    p_diag.add_argument("--data-dir", default="data")
    p_diag.add_argument("--mode", choices=["included", "general"], default="included")
    p_diag.add_argument("--backend", default="stub",
                        help="stub or the base URL of a chat-completions API")
    p_diag.add_argument("--backend-model", default="gpt-4o")

    args = parser.parse_args(argv)

    if args.command == "gen-data":
        paths = synth.write_dataset(args.data_dir, seed=args.seed)
        print(f"wrote {len(paths)} series to {args.data_dir}")
        return 0

    if args.command == "fit":
        normal = load_timeseries(f"{args.data_dir}/fault_0.csv", 0)
        model = pca.fit_from_timeseries(normal, args.variance, args.alpha)
        pca.save_model(model, args.out)
        print(
            f"fitted model: a={model.a}, variance_captured="
            f"{model.variance_captured:.4f}, threshold={model.t2_threshold:.4f}"
        )
        return 0

    if args.command == "serve":
        from .service import run

        if args.config:
            config = ServiceConfig.from_file(args.config)
        else:
            config = ServiceConfig()
        if args.data_dir:
            config.data_dir = args.data_dir
        if args.port:
            config.port = args.port
        if args.model:
            config.model_path = args.model
        if args.fit:
            config.fit_on_start = True
        if args.backend_url:
            config.backend_base_url = args.backend_url
        if args.backend_model:
            config.backend_model = args.backend_model
        backend = None
        if config.backend_base_url and config.backend_model:
            backend = HttpChatBackend(config.backend_base_url, config.backend_model)
        run(config, backend=backend)
        return 0

    if args.command == "eval":
        if args.eval_command == "detect":
            params = evalharness.EvalParams(
                alpha=args.alpha,
                variance_target=args.variance,
                top_k=args.k,
                consecutive_required=args.consecutive,
            )
            _, rows = evalharness.run_detection_eval(args.data_dir, params)
            print(evalharness.detection_table_pretty(rows))
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(evalharness.detection_table_csv(rows))
                print(f"wrote {args.out}")
            return 0
        if args.eval_command == "diagnose":
            _, rows = evalharness.run_detection_eval(args.data_dir)
            if args.backend == "stub":
                backend = StubBackend("IDV(7), IDV(6), IDV(1)")
            else:
                backend = HttpChatBackend(args.backend, args.backend_model)
            mode = (
                explainer.PromptMode.ROOT_CAUSES_INCLUDED
                if args.mode == "included"
                else explainer.PromptMode.GENERAL_REASONING
            )
            diag = evalharness.run_diagnosis_eval(rows, mode, backend)
            print(evalharness.diagnosis_table_pretty(diag))
            return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
