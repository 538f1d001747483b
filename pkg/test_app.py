#!/usr/bin/env python3
"""
Smoke test suite for diarclust
Checks that the package imports, settings load, and schemas validate.
Runs under pytest or directly: python test_app.py
"""

import os
import sys

import numpy as np

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


def test_imports():
    """Test that all packages import"""
    print("Testing imports...")
    import diarclust
    from diarclust import igmm, losses, numerics
    from diarclust.autodiff import Tape, Tensor, apply
    from diarclust.config import get_settings
    from diarclust.main import main as cli_main
    from diarclust.pipeline import chunking, encoder, stitching, synth, training
    from diarclust.repositories import corpus_repository, rttm_repository
    from diarclust.scoring import ahc, der, rttm
    from diarclust.services import clustering_service, diarization_service, scoring_service

    assert diarclust.__version__ == "1.0.0"
    assert callable(cli_main)
    assert callable(get_settings)
    print("✅ All imports successful")


def test_configuration():
    """Test settings defaults and environment overrides"""
    print("Testing configuration...")
    from pydantic import ValidationError

    from diarclust.config import Settings, get_settings, reset_settings

    saved = {key: os.environ.pop(key) for key in list(os.environ) if key.startswith("DIARCLUST_")}
    try:
        reset_settings()
        settings = get_settings()
        assert settings is get_settings()
        assert settings.K_TRUNC == 10
        assert settings.EM_ITERS == 10
        assert settings.STICK_PRIOR == "following"
        assert settings.COLLAR == 0.25

        os.environ["DIARCLUST_ALPHA"] = "2.5"
        os.environ["DIARCLUST_LOG_LEVEL"] = "debug"
        reset_settings()
        assert get_settings().ALPHA == 2.5
        assert get_settings().LOG_LEVEL == "DEBUG"

        os.environ["DIARCLUST_LOG_LEVEL"] = "CHATTY"
        try:
            Settings()
        except ValidationError:
            pass
        else:
            raise AssertionError("unknown log level accepted")
    finally:
        os.environ.pop("DIARCLUST_ALPHA", None)
        os.environ.pop("DIARCLUST_LOG_LEVEL", None)
        os.environ.update(saved)
        reset_settings()

    print("✅ Configuration loaded successfully")


def test_schema_validation():
    """Test Pydantic schema validation"""
    print("Testing schema validation...")
    from pydantic import ValidationError

    from diarclust.schemas import ArrayPayload, IgmmHyper, LossWeights, RunConfig

    hyper = IgmmHyper(alpha=0.5, k_trunc=4, em_iters=3, dim=2)
    assert hyper.stick_prior == "following"

    weights = LossWeights(lambda1=0.2, lambda2=0.3)
    assert abs(weights.diar_weight - 0.5) < 1e-12

    run = RunConfig(command="train", lambda1=0.1, lambda2=0.1, embed_dim=3)
    assert run.train_config().hyper.dim == 3

    payload = ArrayPayload.from_array(np.arange(6.0).reshape(2, 3))
    assert payload.to_array().shape == (2, 3)

    rejected = 0
    for build in (
        lambda: IgmmHyper(alpha=0.0),
        lambda: IgmmHyper(stick_prior="sideways"),
        lambda: LossWeights(lambda1=0.7, lambda2=0.6),
        lambda: RunConfig(command="serve"),
        lambda: ArrayPayload(shape=[2, 2], data=[1.0, 2.0, 3.0]),
    ):
        try:
            build()
        except ValidationError:
            rejected += 1
    assert rejected == 5

    print("✅ Schema validation successful")


def test_cli_entry():
    """Test that the CLI reports its version and rejects bad input"""
    print("Testing CLI entry point...")
    from diarclust.main import main as cli_main

    try:
        cli_main(["--version"])
    except SystemExit as exc:
        assert exc.code == 0
    else:
        raise AssertionError("--version did not exit")

    assert cli_main(["cluster", "--embeddings", "does-not-exist.csv"]) == 1
    print("✅ CLI entry point works")


def main():
    """Run all tests"""
    print("🚀 diarclust - Smoke Test Suite")
    print("=" * 50)

    tests = [
        ("Imports", test_imports),
        ("Configuration", test_configuration),
        ("Schema Validation", test_schema_validation),
        ("CLI Entry", test_cli_entry),
    ]

    passed_tests = 0
    total_tests = len(tests)

    for test_name, test_func in tests:
        try:
            test_func()
            passed_tests += 1
        except Exception as e:
            print(f"❌ {test_name} test failed: {e}")
        print()

    print("=" * 50)
    print(f"📊 Test Results: {passed_tests}/{total_tests} tests passed")

    if passed_tests == total_tests:
        print("🎉 All smoke tests passed.")
        print("\n🚀 Next steps:")
        print("   1. Run: python -m diarclust synth --out-dir corpus")
        print("   2. Run: python -m diarclust train --corpus corpus/corpus.json --out-dir run")
        print("   3. Full suite: pytest")
        return True
    print("❌ Some tests failed. Please check the errors above.")
    return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
