"""
Конечные разности с одной экстраполяцией Ричардсона.

Все производные второго порядка; шаблоны центральные, поэтому
экстраполяция (4 D(h/2) - D(h)) / 3 повышает порядок с 2 до 4.
"""

from typing import Callable, Tuple

import numpy as np


def richardson(coarse, fine):
    """(4·D(h/2) - D(h))/3 и оценка ошибки |D(h/2) - D(h)|"""
    coarse = np.asarray(coarse)
    fine = np.asarray(fine)
    return (4.0 * fine - coarse) / 3.0, np.abs(fine - coarse)


def _laplacian_stencil(f: Callable, z: complex, h: float):
    """Δ = ∂∂̄ = ¼(∂²_x + ∂²_y), пятиточечный шаблон"""
    shifts = np.array([h, -h, 1j * h, -1j * h])
    vals = np.asarray(f(z + shifts))
    center = np.asarray(f(np.array([z])))[0]
    return (np.sum(vals) - 4.0 * center) / (4.0 * h * h)


def wirtinger_laplacian(f: Callable, z: complex, h: float, refine: bool = True) -> Tuple[float, float]:
    """
    ∂∂̄f(z) для векторизованной f.

    Returns:
        (значение, оценка ошибки)
    """
    coarse = _laplacian_stencil(f, z, h)
    if not refine:
        return complex(coarse), float('nan')
    fine = _laplacian_stencil(f, z, h / 2.0)
    val, err = richardson(coarse, fine)
    return complex(val), float(err)


def _hessian_stencil(f: Callable, x: np.ndarray, h: float) -> np.ndarray:
    d = x.size
    eye = np.eye(d) * h
    points = [x]
    for i in range(d):
        points += [x + eye[i], x - eye[i]]
    for i in range(d):
        for j in range(i + 1, d):
            points += [x + eye[i] + eye[j], x + eye[i] - eye[j], x - eye[i] + eye[j], x - eye[i] - eye[j]]
    vals = np.asarray(f(np.array(points)), dtype=float)
    f0 = vals[0]
    H = np.zeros((d, d))
    pos = 1
    for i in range(d):
        H[i, i] = (vals[pos] - 2.0 * f0 + vals[pos + 1]) / (h * h)
        pos += 2
    for i in range(d):
        for j in range(i + 1, d):
            pp, pm, mp, mm = vals[pos:pos + 4]
            H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4.0 * h * h)
            pos += 4
    return H


def real_hessian(f: Callable[[np.ndarray], np.ndarray], x, h: float, refine: bool = True) -> Tuple[np.ndarray, float]:
    """
    Гессиан вещественной функции f: R^d -> R центральными разностями.

    Args:
        f: Функция, принимающая массив точек формы (N, d) и возвращающая N значений
        x: Точка
        h: Шаг
        refine: Применить экстраполяцию Ричардсона

    Returns:
        (гессиан d×d, максимальная оценка ошибки)
    """
    x = np.asarray(x, dtype=float)
    coarse = _hessian_stencil(f, x, h)
    if not refine:
        return coarse, float('nan')
    fine = _hessian_stencil(f, x, h / 2.0)
    val, err = richardson(coarse, fine)
    return val, float(np.max(err))


def stencil_points(z: complex, h: float) -> np.ndarray:
    """Все точки, в которых пятиточечный шаблон с уточнением вычисляет f"""
    base = np.array([0, h, -h, 1j * h, -1j * h, h / 2, -h / 2, 0.5j * h, -0.5j * h])
    return z + base
