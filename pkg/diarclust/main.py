"""
Command-line entry point for diarclust.

Subcommands: synth, cluster, train, diarize, score. Exit codes: 0 on success,
2 for invalid input, configuration or malformed RTTM and CSV files, 1 for
runtime and I/O errors, 3 when training diverges.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from diarclust import __version__
from diarclust.config import Settings, get_settings
from diarclust.exceptions import DiarclustError, EmbeddingCsvError, RttmParseError, TrainingDivergedError
from diarclust.repositories.metrics_repository import MetricsRepository
from diarclust.schemas.common import ErrorResult
from diarclust.schemas.hyper import SynthConfig
from diarclust.schemas.run import RunConfig
from diarclust.services import ClusteringService, DiarizationService, ScoringService, SynthService, TrainingService
from diarclust.utils.helpers import format_percent

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3


def configure_logging(settings: Settings) -> None:
    """Stream handler always, file handler when LOG_FILE is set."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _add_hyper_flags(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument("--alpha", type=float, default=settings.ALPHA, help="DP concentration")
    parser.add_argument("--k-trunc", type=int, default=settings.K_TRUNC, help="truncation level K'")
    parser.add_argument("--em-iters", type=int, default=settings.EM_ITERS, help="unfolded EM iterations")
    parser.add_argument("--stick-prior", choices=["following", "preceding"], default=settings.STICK_PRIOR,
                        help="sticks summed in the E-step prior term")
    parser.add_argument("--init", choices=["uniform", "soft-kmeans"], default=settings.INIT_METHOD,
                        help="responsibility initializer")
    parser.add_argument("--tau", type=float, default=settings.INIT_TEMPERATURE,
                        help="soft k-means temperature")
    parser.add_argument("--seed", type=int, default=settings.SEED, help="random seed")
    parser.add_argument("--out-dir", default=".", help="output directory")


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    """Argument parser whose defaults come from the settings."""
    parser = argparse.ArgumentParser(
        prog="diarclust",
        description="Unfolded iGMM speaker clustering: synthesize, cluster, train, diarize and score.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="write a seeded synthetic corpus and its reference RTTM")
    synth.add_argument("--speakers", type=int, default=3, help="speakers per recording (maximum)")
    synth.add_argument("--min-speakers", type=int, default=None, help="minimum speakers per recording")
    synth.add_argument("--recordings", type=int, default=20, help="number of recordings")
    synth.add_argument("--frames", type=int, default=settings.CHUNKS_PER_RECORDING * settings.CHUNK_FRAMES,
                       help="frames per recording")
    synth.add_argument("--features", type=int, default=settings.FEATURE_DIM, help="feature dimension")
    synth.add_argument("--overlap", type=float, default=settings.OVERLAP, help="overlapped frame fraction")
    synth.add_argument("--noise", type=float, default=settings.NOISE, help="feature noise std")
    synth.add_argument("--inventory", type=int, default=settings.INVENTORY_SIZE, help="speaker inventory size")
    synth.add_argument("--frame-period", type=float, default=settings.FRAME_PERIOD, help="seconds per frame")
    synth.add_argument("--seed", type=int, default=settings.SEED, help="random seed")
    synth.add_argument("--out-dir", default=".", help="output directory")

    cluster = sub.add_parser("cluster", help="cluster an embeddings CSV")
    cluster.add_argument("--embeddings", required=True, help="CSV with columns n,i,s,e_1..e_C")
    cluster.add_argument("--truth", default=None, help="CSV with columns n,label")
    cluster.add_argument("--backend", choices=["igmm", "ahc"], default="igmm", help="clustering backend")
    cluster.add_argument("--mass-threshold", type=float, default=settings.MASS_THRESHOLD,
                         help="cluster mass counted as used")
    cluster.add_argument("--ahc-threshold", type=float, default=None, help="AHC cosine distance stop")
    cluster.add_argument("--ahc-clusters", type=int, default=None, help="AHC target cluster count")
    _add_hyper_flags(cluster, settings)

    train = sub.add_parser("train", help="train the encoder through the unfolded iGMM")
    train.add_argument("--corpus", required=True, help="corpus JSON written by synth")
    train.add_argument("--heldout", type=int, default=0, help="trailing recordings held out for evaluation")
    train.add_argument("--epochs", type=int, default=settings.EPOCHS, help="training epochs")
    train.add_argument("--lr", type=float, default=settings.LEARNING_RATE, help="SGD step size")
    train.add_argument("--lambda1", type=float, default=settings.LAMBDA1, help="cluster loss weight")
    train.add_argument("--lambda2", type=float, default=settings.LAMBDA2, help="speaker-ID loss weight")
    train.add_argument("--chunk-frames", type=int, default=settings.CHUNK_FRAMES, help="frames per chunk")
    train.add_argument("--s-local", type=int, default=settings.S_LOCAL, help="slots per chunk")
    train.add_argument("--embed-dim", type=int, default=settings.EMBED_DIM, help="embedding dimension")
    train.add_argument("--width", type=int, default=settings.ENCODER_WIDTH, help="encoder trunk width")
    train.add_argument("--silence-threshold", type=float, default=settings.SILENCE_THRESHOLD,
                       help="silent slot threshold")
    train.add_argument("--binarize-threshold", type=float, default=settings.BINARIZE_THRESHOLD,
                       help="activity binarization threshold for held-out stitching")
    train.add_argument("--collar", type=float, default=settings.COLLAR, help="held-out DER collar")
    _add_hyper_flags(train, settings)

    diarize = sub.add_parser("diarize", help="diarize a corpus with a trained checkpoint")
    diarize.add_argument("--corpus", required=True, help="corpus JSON written by synth")
    diarize.add_argument("--checkpoint", required=True, help="checkpoint JSON written by train")
    diarize.add_argument("--backend", choices=["igmm", "ahc"], default="igmm", help="clustering backend")
    diarize.add_argument("--ahc-threshold", type=float, default=None, help="AHC cosine distance stop")
    diarize.add_argument("--chunk-frames", type=int, default=settings.CHUNK_FRAMES, help="frames per chunk")
    diarize.add_argument("--silence-threshold", type=float, default=settings.SILENCE_THRESHOLD,
                         help="silent slot threshold")
    diarize.add_argument("--binarize-threshold", type=float, default=settings.BINARIZE_THRESHOLD,
                         help="activity binarization threshold")
    diarize.add_argument("--collar", type=float, default=settings.COLLAR, help="DER collar")
    _add_hyper_flags(diarize, settings)

    score = sub.add_parser("score", help="score a hypothesis RTTM against a reference")
    score.add_argument("ref", help="reference RTTM")
    score.add_argument("hyp", help="hypothesis RTTM")
    score.add_argument("--collar", type=float, default=settings.COLLAR, help="collar in seconds")
    score.add_argument("--workers", type=int, default=None,
                       help=f"scoring threads (default {settings.SCORING_WORKERS})")
    score.add_argument("--json", action="store_true", help="also print the overall report as JSON")
    score.add_argument("--out-dir", default=None, help="write der.csv and der.json here")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = {"command": args.command}
    flag_map = {
        "seed": "seed", "alpha": "alpha", "k_trunc": "k_trunc", "em_iters": "em_iters",
        "stick_prior": "stick_prior", "init": "init_method", "tau": "init_temperature",
        "mass_threshold": "mass_threshold", "out_dir": "out_dir", "embeddings": "embeddings",
        "truth": "truth", "corpus": "corpus", "epochs": "epochs", "lr": "learning_rate",
        "lambda1": "lambda1", "lambda2": "lambda2", "chunk_frames": "chunk_frames",
        "s_local": "s_local", "embed_dim": "embed_dim", "width": "encoder_width",
        "silence_threshold": "silence_threshold", "binarize_threshold": "binarize_threshold",
        "collar": "collar", "checkpoint": "checkpoint", "ref": "ref", "hyp": "hyp",
    }
    for flag, field in flag_map.items():
        if hasattr(args, flag):
            values[field] = getattr(args, flag)
    return RunConfig(**values)


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    run = _run_config(args)
    config = SynthConfig(
        speakers=args.speakers,
        min_speakers=args.min_speakers,
        frames=args.frames,
        feature_dim=args.features,
        overlap=args.overlap,
        noise=args.noise,
        inventory_size=args.inventory,
        frame_period=args.frame_period,
    )
    if args.recordings < 1:
        raise ValueError("--recordings must be at least 1")
    result = SynthService().generate(config, args.recordings, run.seed, run.out_dir)
    print(result.message)
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace, settings: Settings) -> int:
    run = _run_config(args)
    result = ClusteringService(settings).cluster(run, args.backend, args.ahc_threshold, args.ahc_clusters)
    print(result.message)
    return EXIT_OK


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    run = _run_config(args)
    result = TrainingService().train(run, args.heldout)
    print(result.message)
    return EXIT_OK


def cmd_diarize(args: argparse.Namespace, settings: Settings) -> int:
    run = _run_config(args)
    result = DiarizationService(settings).diarize(run, args.backend, args.ahc_threshold)
    print(result.message)
    return EXIT_OK


def cmd_score(args: argparse.Namespace, settings: Settings) -> int:
    run = _run_config(args)
    if args.workers is not None and args.workers < 1:
        raise ValueError("--workers must be at least 1")
    per_recording, overall = ScoringService(settings).score(run.ref, run.hyp, run.collar, args.workers)
    if len(per_recording) > 1:
        for rid, report in per_recording.items():
            print(f"{rid}: DER {format_percent(report.der)}")
    print(
        f"DER {format_percent(overall.der)}  (MI {format_percent(overall.missed)} / "
        f"FA {format_percent(overall.false_alarm)} / CF {format_percent(overall.confusion)})"
    )
    if args.json:
        print(overall.model_dump_json())
    if run.out_dir:
        repo = MetricsRepository(run.out_dir)
        repo.write_der(per_recording)
        repo.write_der_json(overall)
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "cluster": cmd_cluster,
    "train": cmd_train,
    "diarize": cmd_diarize,
    "score": cmd_score,
}


def _fail(error: str, detail: Optional[str], exit_code: int) -> int:
    result = ErrorResult(error=error, detail=detail, exit_code=exit_code)
    print(f"error: {result.error}" + (f": {result.detail}" if result.detail else ""), file=sys.stderr)
    return result.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code."""
    try:
        settings = get_settings()
    except ValidationError as e:
        return _fail("invalid settings", str(e), EXIT_INVALID)

    args = build_parser(settings).parse_args(argv)
    configure_logging(settings)
    logger.info(f"Starting {args.command}")
    try:
        code = COMMANDS[args.command](args, settings)
    except TrainingDivergedError as e:
        logger.error(f"Training diverged at epoch {e.epoch}: {e}")
        return _fail("training diverged", str(e), EXIT_DIVERGED)
    except (RttmParseError, EmbeddingCsvError) as e:
        logger.error(f"Malformed input file: {e}")
        return _fail("malformed input", str(e), EXIT_INVALID)
    except DiarclustError as e:
        logger.error(f"{args.command} failed: {e}")
        return _fail(f"{args.command} failed", str(e), EXIT_RUNTIME)
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return _fail("invalid input", str(e), EXIT_INVALID)
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return _fail("I/O error", str(e), EXIT_RUNTIME)
    logger.info(f"Finished {args.command}")
    return code


if __name__ == "__main__":
    sys.exit(main())
