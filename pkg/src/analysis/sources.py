"""
Источники ядер: единый интерфейс eval / lift / diag / weight над
матрицей Грама, замкнутыми формулами и асимптотическим приближением.
"""

import abc
import logging
from typing import Any, Dict, Optional

import numpy as np

from src.analysis.closedform import gaussian_poly_lift, koshelev_lift
from src.analysis.expansion import approx_lift
from src.analysis.gram import BasisSpec, GramKernel, QuadratureSpec, gram_kernel_build
from src.config.kernel_config import ACTIVE_CONFIG
from src.models.errors import ErrorCode, raise_for
from src.models.potential import DomainSpec, HermitianPotential, eval_potential

logger = logging.getLogger(__name__)


class KernelSource(abc.ABC):
    """Подъем E⊗2[K_q] и вес области; все остальное выводится из них"""

    kind: str = 'abstract'
    q: int = 1

    @abc.abstractmethod
    def lift(self, z, zprime, w, wprime):
        """E⊗2[K](z, z'; w, w')"""

    @abc.abstractmethod
    def weight(self, z):
        """Вес ω(z)"""

    def eval(self, z, w):
        return self.lift(z, z, w, w)

    def diag(self, z):
        val = np.real(np.asarray(self.eval(z, z)))
        return val if val.ndim else float(val)

    def describe(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'q': self.q}


class GramSource(KernelSource):
    """Обертка над GramKernel"""

    kind = 'gram'

    def __init__(self, kernel: GramKernel, n_refinement_delta: Optional[float] = None):
        """
        Args:
            kernel: Построенное ядро
            n_refinement_delta: Относительное изменение ядра при n -> n + step (если измерялось)
        """
        self.kernel = kernel
        self.q = kernel.basis.q
        self.n = kernel.basis.n
        self.n_refinement_delta = n_refinement_delta

    def lift(self, z, zprime, w, wprime):
        return self.kernel.lift(z, zprime, w, wprime)

    def weight(self, z):
        return self.kernel.weight(z)

    def describe(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'q': self.q, 'n': self.n, 'n_refinement_delta': self.n_refinement_delta,
                'method': self.kernel.quadrature.get('method'),
                'condition': self.kernel.condition_estimate,
                'warnings': list(self.kernel.warnings)}


class GaussianSource(KernelSource):
    """Точное ядро для Q = |z|²"""

    kind = 'closedform'

    def __init__(self, q: int, m: float):
        self.q = q
        self.m = m

    def lift(self, z, zprime, w, wprime):
        return gaussian_poly_lift(self.q, self.m, z, zprime, w, wprime)

    def weight(self, z):
        val = np.exp(-2.0 * self.m * np.abs(np.asarray(z, dtype=complex)) ** 2)
        return val if val.ndim else float(val)

    def describe(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'family': 'gaussian', 'q': self.q, 'm': self.m}


class KoshelevSource(KernelSource):
    """Ядро единичного диска с весом 1/π"""

    kind = 'closedform'

    def __init__(self, q: int):
        self.q = q

    def lift(self, z, zprime, w, wprime):
        return koshelev_lift(self.q, z, zprime, w, wprime)

    def weight(self, z):
        val = np.full(np.shape(z), 1.0 / np.pi)
        return val if val.ndim else float(val)

    def describe(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'family': 'koshelev', 'q': self.q}


class ApproxSource(KernelSource):
    """Асимптотическое приближение K^⟨k⟩"""

    kind = 'approx'

    def __init__(self, P: HermitianPotential, m: float, q: int, k: int = 0, origin: str = 'printed'):
        self.P = P
        self.m = m
        self.q = q
        self.k = k
        self.origin = origin

    def lift(self, z, zprime, w, wprime):
        return approx_lift(self.P, self.m, self.q, self.k, z, zprime, w, wprime, self.origin)

    def weight(self, z):
        val = np.exp(-2.0 * self.m * np.asarray(eval_potential(self.P, z)))
        return val if np.ndim(val) else float(val)

    def describe(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'q': self.q, 'm': self.m, 'k': self.k, 'origin': self.origin}


def make_source(kind: str, P: Optional[HermitianPotential], m: Optional[float], q: int,
                domain: Optional[DomainSpec] = None, n: Optional[int] = None, k: int = 0,
                quad: Optional[QuadratureSpec] = None, cache=None, threads: int = 1,
                config=None, origin: str = 'printed',
                n_refinement_delta: Optional[float] = None) -> KernelSource:
    """
    Создает источник ядра по имени.

    Args:
        kind: 'gram', 'closedform' или 'approx'
        P: Потенциал (None для модельного диска)
        m: Показатель веса
        q: Порядок полианалитичности
        domain: Область (для gram; для closedform выбирает семейство)
        n: Число голоморфных степеней базиса
        k: Порядок приближения (для approx)
        origin: Происхождение коэффициентов approx: 'printed' или 'solved'
        n_refinement_delta: Измеренное изменение ядра при уточнении n (для gram)

    Raises:
        ValidationError: CONFIG_INVALID, если closedform недоступна для потенциала
    """
    config = config or ACTIVE_CONFIG
    model_disk = domain is not None and domain.is_model_disk and P is None
    if kind == 'gram':
        gram_cfg = config.get_config('GRAM_CONFIG')
        if domain is None:
            domain = DomainSpec.plane(m)
        spec = BasisSpec(q, n or gram_cfg['default_n'], gram_cfg['radial_blocking'])
        return GramSource(gram_kernel_build(domain, P, m, spec, quad=quad, threads=threads,
                                            cache=cache, config=config), n_refinement_delta)
    if kind == 'closedform':
        if model_disk:
            return KoshelevSource(q)
        if P is not None and P.is_gaussian and m is not None:
            return GaussianSource(q, m * float(P.coeffs[1, 1].real))
        raise_for(ErrorCode.CONFIG_INVALID, "замкнутая формула есть только для диска и Q = |z|²")
    if kind == 'approx':
        if P is None or m is None:
            raise_for(ErrorCode.CONFIG_INVALID, "приближение требует потенциал и m")
        return ApproxSource(P, m, q, k, origin)
    raise_for(ErrorCode.CONFIG_INVALID, f"неизвестный источник ядра: {kind}", kind=kind)
