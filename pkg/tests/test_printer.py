from src.jetcas.coeff import CoeffExpr
from src.jetcas.printer import format_coeff, render, symbol_name, to_json
from src.jetcas.solver import printed_q2, solve_expansion_q1


def test_symbol_names():
    assert symbol_name(1, 1) == "β"
    assert symbol_name(2, 1) == "∂β"
    assert symbol_name(1, 2) == "∂̄β"
    assert symbol_name(2, 0) == "∂²Q"


def test_format_leading_coefficient():
    assert format_coeff(CoeffExpr.beta() * 2) == "2*β"


def test_render_q1_lines():
    lines = render(solve_expansion_q1(1), 1)
    assert lines[0] == "π·L^1_0 = 2*β"
    assert lines[1].startswith("π·L^1_1 = ")


def test_render_bianalytic_omits_zero_components():
    line = render([printed_q2(0)], 2)[0]
    assert line.startswith("π·L^2_0 = ")
    assert "|z - w|²" in line
    assert "(z - w)" not in line.replace("|z - w|²", "")


def test_json_structure():
    data = to_json([printed_q2(0), printed_q2(1)], 2)
    assert data['q'] == 2 and data['scale'] == 'pi'
    first = data['orders'][1]['components']['c0']
    assert first['structure']['beta_denominator'] == 0
    assert first['text'] == "4*β"
