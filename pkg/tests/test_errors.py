import pytest

from src.models.errors import (ConfigError, ErrorCategory, ErrorCode, KernelError, NumericalError,
                               ValidationError, raise_for)


@pytest.mark.parametrize("code, cls, exit_code", [
    (ErrorCode.OUT_OF_DOMAIN, ValidationError, 1),
    (ErrorCode.NOT_POSITIVE_DEFINITE, NumericalError, 2),
    (ErrorCode.DIVERGENT, NumericalError, 2),
    (ErrorCode.CONFIG_INVALID, ValidationError, 1),
    (ErrorCode.CONFIG_PARSE, ConfigError, 3),
])
def test_raise_for_picks_class_and_exit_code(code, cls, exit_code):
    with pytest.raises(cls) as info:
        raise_for(code, "сообщение", index=3)
    assert info.value.code is code
    assert info.value.exit_code == exit_code
    assert info.value.details == {'index': 3}


def test_error_serializes_to_dict():
    err = KernelError(ErrorCode.BETA_ZERO)
    data = err.to_dict()
    assert data['code'] == 'BETA_ZERO'
    assert data['message'] == 'BETA_ZERO'


def test_ill_conditioned_is_numerical_category():
    assert ErrorCode.ILL_CONDITIONED.category is ErrorCategory.NUMERICAL
