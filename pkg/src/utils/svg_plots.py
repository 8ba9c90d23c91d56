"""
SVG-графики исследований (matplotlib, backend Agg).
"""

import logging
import os
from typing import Dict, Optional, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

logger = logging.getLogger(__name__)


def _save(fig, path: str) -> str:
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    fig.tight_layout()
    # SVG без даты в метаданных совпадает между запусками
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.info("plot_written path=%s", path)
    return path


def plot_error_vs_m(path: str, ms: Sequence[float], series: Dict[str, Sequence[float]],
                    title: str = "", ylabel: str = "sup-ошибка") -> Optional[str]:
    """
    Log-log график ошибки против m с опорной прямой наклона -1.

    Args:
        path: Путь к .svg
        ms: Значения m
        series: {подпись: ошибки}
    """
    ms = np.asarray(ms, dtype=float)
    positive = {k: np.asarray(v, dtype=float) for k, v in series.items() if np.all(np.asarray(v) > 0)}
    if len(ms) == 0 or not positive:
        logger.warning("plot_skipped path=%s reason=no_positive_data", path)
        return None
    plt.rcParams['svg.hashsalt'] = 'bergman'
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for label, errors in positive.items():
        ax.loglog(ms, errors, 'o-', ms=5, lw=1.5, label=label)
    anchor = max(v[0] for v in positive.values())
    ax.loglog(ms, anchor * ms[0] / ms, 'k--', lw=1, alpha=0.6, label='∝ 1/m')
    ax.set_xlabel('m')
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which='both', alpha=0.3)
    return _save(fig, path)


def plot_kernel_heatmap(path: str, xs: np.ndarray, ys: np.ndarray, values: np.ndarray,
                        title: str = "") -> str:
    """Тепловая карта |K| или корреляционного ядра на прямоугольной сетке"""
    plt.rcParams['svg.hashsalt'] = 'bergman'
    fig, ax = plt.subplots(figsize=(5, 4.5))
    mesh = ax.pcolormesh(xs, ys, values, shading='auto', cmap='viridis')
    fig.colorbar(mesh, ax=ax)
    ax.set_aspect('equal')
    ax.set_xlabel('Re w')
    ax.set_ylabel('Im w')
    if title:
        ax.set_title(title)
    return _save(fig, path)
