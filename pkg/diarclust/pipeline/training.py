"""
Multi-task training through the unfolded iGMM, and held-out evaluation.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from diarclust.autodiff import ops as F
from diarclust.autodiff.ops import is_recorded, value_of
from diarclust.autodiff.tensor import Tape
from diarclust.exceptions import ShapeMismatchError, TrainingDivergedError
from diarclust.igmm import hard_assign, init_responsibilities, run_unfolded
from diarclust.losses import cluster_loss, exact_ari, pit_diar_loss, speaker_id_loss, total_loss
from diarclust.models.encoder import EncoderParams
from diarclust.models.recording import Chunk, ChunkOutput, Recording
from diarclust.models.timeline import DiarTimeline
from diarclust.pipeline.chunking import chunk_recording
from diarclust.pipeline.encoder import encode_chunk
from diarclust.pipeline.stitching import gather_embeddings, slot_speakers, stitch
from diarclust.schemas.hyper import TrainConfig
from diarclust.schemas.report import DerReport, EpochMetrics
from diarclust.scoring.ahc import constrained_ahc
from diarclust.scoring.der import aggregate_reports, score_der
from diarclust.utils.helpers import make_rng

logger = logging.getLogger(__name__)


@dataclass
class RecordingLosses:
    """Loss terms of one recording; missing terms are None."""

    diar: object
    cluster: Optional[object]
    spk: Optional[object]
    total: object
    n_embeddings: int

    def scalars(self) -> Dict[str, float]:
        def as_float(x) -> float:
            return float(value_of(x)) if x is not None else math.nan

        return {
            "L_diar": as_float(self.diar),
            "L_cluster": as_float(self.cluster),
            "L_spk": as_float(self.spk),
            "L_total": as_float(self.total),
        }


@dataclass
class EvaluationResult:
    recording_id: str
    report: DerReport
    ari: float
    hypothesis: DiarTimeline = field(default_factory=DiarTimeline)
    n_speakers: int = 0


def _encode_all(chunks: Sequence[Chunk], params: EncoderParams, config: TrainConfig) -> List[ChunkOutput]:
    return [
        encode_chunk(c.features, params, c.index, c.start_frame, config.silence_threshold)
        for c in chunks
    ]


def _aligned_speakers(chunks: Sequence[Chunk], outputs: Sequence[ChunkOutput]):
    """PIT loss per chunk and the global speaker column behind each output slot."""
    losses, speakers = [], []
    for chunk, out in zip(chunks, outputs):
        loss, perm = pit_diar_loss(chunk.labels, out.activities)
        losses.append(loss)
        speakers.append(slot_speakers(chunk.speakers, perm))
    return losses, speakers


def recording_losses(
    params: EncoderParams,
    rec: Recording,
    config: TrainConfig,
) -> Optional[RecordingLosses]:
    """
    Forward pass of one recording.

    Chunk, encode, PIT diarization loss per chunk, gather non-silent slots
    that PIT aligns to a real speaker, unfolded EM on their embeddings, then
    cARI and speaker-ID losses. A term whose weight is 0 is still computed on
    plain values for reporting but kept off the tape.

    Returns:
        RecordingLosses, or None when the recording yields no full chunk
    """
    chunks = chunk_recording(rec, config.chunk_frames, config.s_local)
    if not chunks:
        logger.warning(f"{rec.recording_id}: shorter than one chunk, skipped")
        return None

    outputs = _encode_all(chunks, params, config)
    pit_losses, speakers = _aligned_speakers(chunks, outputs)
    diar = pit_losses[0]
    for loss in pit_losses[1:]:
        diar = F.add(diar, loss)
    diar = F.div(diar, float(len(pit_losses)))

    embeddings = gather_embeddings(outputs, keep=lambda pos, slot: speakers[pos][slot] >= 0)
    columns = {out.index: speakers[pos] for pos, out in enumerate(outputs)}
    truth = [columns[i][s] for i, s in embeddings.index]
    weights = config.weights

    cluster_term = None
    if embeddings.n >= 2:
        matrix = embeddings.matrix if weights.lambda1 > 0 else embeddings.values()
        hyper = config.hyper
        init = init_responsibilities(matrix, hyper.k_trunc, config.init_method, config.init_temperature)
        R = run_unfolded(matrix, hyper, init, differentiable=weights.lambda1 > 0)
        cluster_term = cluster_loss(R, truth)

    spk_term = None
    if embeddings.n >= 1:
        identities = [rec.speaker_ids[col] for col in truth]
        if weights.lambda2 > 0:
            spk_term = speaker_id_loss(embeddings.matrix, identities, params.w_spk, params.b_spk)
        else:
            spk_term = speaker_id_loss(embeddings.values(), identities,
                                       value_of(params.w_spk), value_of(params.b_spk))

    # Too few embeddings: a zero that stays on the tape with the PIT loss.
    zero = F.mul(diar, 0.0)
    total = total_loss(
        diar,
        (cluster_term if cluster_term is not None else zero) if weights.lambda1 > 0 else None,
        (spk_term if spk_term is not None else zero) if weights.lambda2 > 0 else None,
        weights,
    )
    return RecordingLosses(diar, cluster_term, spk_term, total, embeddings.n)


def sgd_step(
    params: EncoderParams,
    rec: Recording,
    config: TrainConfig,
    learning_rate: Optional[float] = None,
) -> Tuple[EncoderParams, Optional[RecordingLosses]]:
    """One plain gradient step on a fresh tape; returns the updated parameters and the losses."""
    tape = Tape()
    recorded = params.on_tape(tape)
    losses = recording_losses(recorded, rec, config)
    if losses is None:
        return params, None
    total_value = float(value_of(losses.total))
    if not math.isfinite(total_value):
        raise TrainingDivergedError(f"non-finite loss {total_value} on {rec.recording_id}")
    if not is_recorded(losses.total):
        logger.debug(f"{rec.recording_id}: loss does not depend on the encoder, no update")
        return params, losses

    names = EncoderParams.names()
    grads = tape.backward(losses.total, [getattr(recorded, name) for name in names])
    step = config.learning_rate if learning_rate is None else learning_rate
    updated = {
        name: np.asarray(value_of(getattr(params, name))) - step * grad
        for name, grad in zip(names, grads)
    }
    return EncoderParams.from_dict(updated), losses


BACKENDS = ("igmm", "ahc")


def _cluster_slots(embeddings, config: TrainConfig, backend: str, ahc_threshold: float):
    """Slot clustering for stitching: responsibilities (iGMM) or labels (AHC), plus hard labels."""
    if embeddings.n == 0:
        return np.zeros((0, config.hyper.k_trunc)), np.zeros(0, dtype=np.int64)
    if backend == "ahc":
        labels = constrained_ahc(embeddings, threshold=ahc_threshold)
        return labels, labels
    init = init_responsibilities(embeddings, config.hyper.k_trunc, config.init_method, config.init_temperature)
    R = run_unfolded(embeddings, config.hyper, init)
    return R, hard_assign(R)


def evaluate(
    params: EncoderParams,
    recordings: Sequence[Recording],
    config: TrainConfig,
    backend: str = "igmm",
    ahc_threshold: float = 0.5,
) -> List[EvaluationResult]:
    """
    Inference on each recording: chunk, encode, drop silent slots, cluster,
    stitch, then score DER against the covered frames of the reference and
    exact ARI against PIT-aligned slot speakers.

    Args:
        params: Encoder parameters
        recordings: Recordings to diarize
        config: Chunking, iGMM and scoring settings
        backend: "igmm" (unfolded EM) or "ahc" (same-chunk constrained AHC)
        ahc_threshold: Cosine distance stop for the AHC backend

    Returns:
        List[EvaluationResult]: One result per recording with at least one chunk
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend: {backend} (expected one of {BACKENDS})")
    plain = params.values()
    results = []
    for rec in recordings:
        chunks = chunk_recording(rec, config.chunk_frames, config.s_local)
        if not chunks:
            logger.warning(f"{rec.recording_id}: shorter than one chunk, not evaluated")
            continue
        outputs = _encode_all(chunks, plain, config)
        _, speakers = _aligned_speakers(chunks, outputs)
        embeddings = gather_embeddings(outputs)
        assignments, labels = _cluster_slots(embeddings, config, backend, ahc_threshold)

        covered = len(chunks) * config.chunk_frames
        hypothesis = stitch(outputs, assignments, embeddings.index, rec.frame_period,
                            config.binarize_threshold, n_frames=covered)
        reference = DiarTimeline.from_frames(
            rec.activities[:covered], rec.frame_period, [f"ref{k}" for k in range(rec.n_speakers)]
        )
        report = score_der(reference, hypothesis, config.collar)

        columns = {out.index: speakers[pos] for pos, out in enumerate(outputs)}
        truth = [columns[i][s] for i, s in embeddings.index]
        scored = [n for n, t in enumerate(truth) if t >= 0]
        ari = (
            exact_ari(labels[scored], [truth[n] for n in scored])
            if len(scored) >= 2 else math.nan
        )
        results.append(EvaluationResult(rec.recording_id, report, ari, hypothesis, rec.n_speakers))
    return results


def reports_by_speaker_count(results: Sequence[EvaluationResult]) -> Dict[int, DerReport]:
    """Speech-weighted DER report per number of reference speakers, keys ascending."""
    groups: Dict[int, List[DerReport]] = {}
    for result in results:
        groups.setdefault(result.n_speakers, []).append(result.report)
    return {count: aggregate_reports(groups[count]) for count in sorted(groups)}


def train(
    params: EncoderParams,
    corpus: Sequence[Recording],
    config: TrainConfig,
    heldout: Sequence[Recording] = (),
) -> Tuple[EncoderParams, List[EpochMetrics]]:
    """
    Per-recording SGD on the weighted multi-task loss.

    Args:
        params: Initial encoder parameters
        corpus: Training recordings (non-empty)
        config: Loss weights, iGMM hyperparameters and optimizer settings
        heldout: Recordings for the per-epoch DER and ARI columns

    Returns:
        tuple: (trained parameters, one EpochMetrics per epoch)

    Raises:
        TrainingDivergedError: If a loss becomes non-finite
    """
    if not corpus:
        raise ValueError("training corpus is empty")
    emb_dim = np.shape(value_of(params.w_emb))[1]
    if emb_dim != config.hyper.dim:
        raise ShapeMismatchError(f"encoder embeds into {emb_dim} dims, hyper.dim is {config.hyper.dim}")

    rng = make_rng(config.seed)
    params = params.values()
    history = []
    for epoch in range(1, config.epochs + 1):
        totals: Dict[str, List[float]] = {"L_diar": [], "L_cluster": [], "L_spk": [], "L_total": []}
        for position in rng.permutation(len(corpus)):
            try:
                params, losses = sgd_step(params, corpus[position], config)
            except TrainingDivergedError as e:
                raise TrainingDivergedError(str(e), epoch=epoch) from e
            if losses is None:
                continue
            for key, value in losses.scalars().items():
                totals[key].append(value)

        metrics = {key: _nanmean(values) for key, values in totals.items()}
        if heldout:
            results = evaluate(params, heldout, config)
            overall = aggregate_reports([r.report for r in results])
            metrics.update(
                ARI=_nanmean([r.ari for r in results]),
                DER=overall.der, MI=overall.missed, FA=overall.false_alarm, CF=overall.confusion,
            )
        row = EpochMetrics(epoch=epoch, **metrics)
        history.append(row)
        logger.info(
            f"Epoch {epoch}/{config.epochs}: L_total={row.L_total:.4f} L_diar={row.L_diar:.4f} "
            f"L_cluster={row.L_cluster:.4f} L_spk={row.L_spk:.4f} ARI={row.ARI:.4f} DER={row.DER:.4f}"
        )
    return params, history


def _nanmean(values: Sequence[float]) -> float:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0 or np.all(np.isnan(arr)):
        return math.nan
    return float(np.nanmean(arr))
