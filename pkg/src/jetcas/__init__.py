"""
Символьный движок корректирующего алгоритма: поле коэффициентов,
усеченные ряды по (w - z, w̄ - z̄), операторы и решатель для q = 1, 2.
"""

from src.jetcas.coeff import CoeffExpr
from src.jetcas.series import JetSeries, MSeries
from src.jetcas.operators import membership_test, op_N, op_S, op_S_inv, op_Sprime, op_nabla
from src.jetcas.solver import (BianalyticCoeffs, printed_q2, solve_expansion_q1, solve_expansion_q2,
                               united_condition_q2, verify_printed_q2)
from src.jetcas.identities import run_identity_checks
from src.jetcas.printer import format_coeff, render, to_json

__all__ = [
    'CoeffExpr',
    'JetSeries',
    'MSeries',
    'membership_test',
    'op_N',
    'op_S',
    'op_S_inv',
    'op_Sprime',
    'op_nabla',
    'BianalyticCoeffs',
    'printed_q2',
    'solve_expansion_q1',
    'solve_expansion_q2',
    'united_condition_q2',
    'verify_printed_q2',
    'run_identity_checks',
    'format_coeff',
    'render',
    'to_json'
]
