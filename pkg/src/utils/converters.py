from typing import Any, List


def complex_to_pair(value: complex) -> List[float]:
    """
    Преобразует комплексное число в пару [re, im] для JSON.
    """
    value = complex(value)
    return [float(value.real), float(value.imag)]


def jsonable(value: Any) -> Any:
    """
    Рекурсивно заменяет комплексные числа парами [re, im].
    """
    if isinstance(value, complex):
        return complex_to_pair(value)
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value
