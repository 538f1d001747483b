"""
Tape and node types for reverse-mode differentiation.

A Tensor wraps a float64 numpy array (0-d for scalars) recorded on a Tape.
Nodes are appended in creation order, which is already a topological order,
so backward is a single reverse sweep.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from diarclust.exceptions import TapeStateError

VjpFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class Tensor:
    """A recorded value with links to the nodes it was computed from."""

    # Make numpy defer binary operators (ndarray + Tensor) to Tensor.
    __array_ufunc__ = None
    __array_priority__ = 1000.0

    __slots__ = ("value", "tape", "parents", "vjp", "index", "name")

    def __init__(
        self,
        value: np.ndarray,
        tape: "Tape",
        parents: Tuple[Optional["Tensor"], ...] = (),
        vjp: Optional[VjpFn] = None,
        name: Optional[str] = None,
    ):
        self.value = np.asarray(value, dtype=np.float64)
        self.tape = tape
        self.parents = parents
        self.vjp = vjp
        self.name = name
        self.index = tape._record(self)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def size(self) -> int:
        return self.value.size

    def __len__(self) -> int:
        return len(self.value)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Tensor{label} #{self.index} shape={self.value.shape}>"


class Tape:
    """Records nodes created from its variables and runs the backward sweep."""

    def __init__(self):
        self._nodes: List[Tensor] = []

    def __len__(self) -> int:
        return len(self._nodes)

    def _record(self, node: Tensor) -> int:
        self._nodes.append(node)
        return len(self._nodes) - 1

    def variable(self, value, name: Optional[str] = None) -> Tensor:
        """
        Register an input the backward pass can differentiate with respect to.

        Args:
            value: Array or scalar; copied to float64
            name: Optional label used in reprs

        Returns:
            Tensor: The new leaf node
        """
        return Tensor(np.array(value, dtype=np.float64, copy=True), self, name=name)

    def owns(self, node: Tensor) -> bool:
        return (
            node.tape is self
            and node.index < len(self._nodes)
            and self._nodes[node.index] is node
        )

    def backward(self, seed: Tensor, wrt: Sequence[Tensor]) -> List[np.ndarray]:
        """
        Propagate adjoints from a scalar seed back to the requested inputs.

        Args:
            seed: Scalar node recorded on this tape (the loss)
            wrt: Nodes to return gradients for

        Returns:
            List[np.ndarray]: d seed / d node for each node in wrt; zeros for
            nodes the seed does not depend on

        Raises:
            TapeStateError: If the seed was never recorded here or is not scalar
        """
        if not isinstance(seed, Tensor) or not self.owns(seed):
            raise TapeStateError("backward called before the seed was recorded on this tape")
        if seed.value.size != 1:
            raise TapeStateError(f"seed must be scalar, got shape {seed.value.shape}")
        for node in wrt:
            if not isinstance(node, Tensor) or not self.owns(node):
                raise TapeStateError("gradient requested for a node not on this tape")

        wanted = {node.index for node in wrt}
        found = {}
        adjoints = {seed.index: np.ones_like(seed.value)}
        for idx in range(seed.index, -1, -1):
            grad = adjoints.pop(idx, None)
            if grad is None:
                continue
            node = self._nodes[idx]
            if idx in wanted:
                found[idx] = grad
            if node.vjp is None:
                continue
            for parent, parent_grad in zip(node.parents, node.vjp(grad)):
                if parent is None or parent_grad is None:
                    continue
                acc = adjoints.get(parent.index)
                adjoints[parent.index] = parent_grad if acc is None else acc + parent_grad

        return [found.get(node.index, np.zeros_like(node.value)) for node in wrt]
