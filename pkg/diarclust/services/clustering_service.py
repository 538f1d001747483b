"""
Embedding clustering service (iGMM or constrained AHC).
"""

import logging
from pathlib import Path
from typing import Optional

import pandas as pd

from diarclust.config import Settings
from diarclust.igmm import effective_cluster_count, hard_assign, init_responsibilities, run_unfolded
from diarclust.losses import exact_ari
from diarclust.repositories.embedding_repository import EmbeddingRepository
from diarclust.schemas.common import CommandResult
from diarclust.schemas.run import RunConfig
from diarclust.scoring.ahc import constrained_ahc

logger = logging.getLogger(__name__)


class ClusteringService:
    """Service for clustering an embeddings CSV."""

    def __init__(self, settings: Settings):
        self.settings = settings

    def cluster(
        self,
        run: RunConfig,
        backend: str = "igmm",
        ahc_threshold: Optional[float] = None,
        ahc_clusters: Optional[int] = None,
    ) -> CommandResult:
        """
        Cluster the embeddings named in `run` and write the results.

        Writes assignments.csv and cluster_metrics.csv; the iGMM backend also
        writes responsibilities.csv. ARI is computed when a truth file is given.

        Returns:
            CommandResult: Message with the cluster count and ARI
        """
        out_dir = Path(run.out_dir or ".")
        repo = EmbeddingRepository(out_dir)
        embeddings = repo.read_embeddings(run.embeddings)
        if embeddings.n == 0:
            raise ValueError("embeddings file has no rows")
        outputs = []

        if backend == "igmm":
            hyper = run.igmm_hyper(dim=embeddings.dim)
            init = init_responsibilities(embeddings, hyper.k_trunc, run.init_method, run.init_temperature)
            R = run_unfolded(embeddings, hyper, init)
            labels = hard_assign(R)
            n_clusters = effective_cluster_count(R, run.mass_threshold)
            outputs.append(str(repo.write_responsibilities(R, "responsibilities.csv")))
        elif backend == "ahc":
            threshold = ahc_threshold
            if threshold is None and ahc_clusters is None:
                threshold = self.settings.AHC_THRESHOLD
            labels = constrained_ahc(embeddings, threshold=threshold, n_clusters=ahc_clusters)
            n_clusters = int(labels.max()) + 1
        else:
            raise ValueError(f"unknown backend: {backend}")
        outputs.append(str(repo.write_assignments(embeddings, labels, "assignments.csv")))

        ari = float("nan")
        if run.truth:
            truth = repo.read_truth(run.truth, embeddings.n)
            ari = exact_ari(labels, truth)

        metrics_path = out_dir / "cluster_metrics.csv"
        pd.DataFrame([{"backend": backend, "n": embeddings.n, "clusters": n_clusters, "ARI": ari}]).to_csv(
            metrics_path, index=False, float_format="%.6f"
        )
        outputs.append(str(metrics_path))

        message = f"{backend}: {embeddings.n} embeddings, {n_clusters} clusters"
        if run.truth:
            message += f", ARI {ari:.4f}"
        logger.info(message)
        return CommandResult(message=message, outputs=outputs)
