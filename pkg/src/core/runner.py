"""
Оркестратор команд CLI: строит источники ядер по конфигурации запуска,
выполняет вычисления и записывает таблицы, сводки и графики.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.analysis.bergman_metrics import (approx_double_diagonal, default_step, local_length_scale,
                                          metric1_density, metric2_density, poly_metric1_density,
                                          poly_metric1_matrix, rescaled_metric_study)
from src.analysis.bounds import green_potential_origin, run_bounds_harness
from src.analysis.expansion import blowup_error_study, coefficient_set, default_blowup_grid
from src.analysis.gram import BasisSpec, choose_n, correlation_kernel, n_refinement_delta
from src.analysis.sources import KernelSource, make_source
from src.config.run_config import RunConfig
from src.jetcas.identities import run_identity_checks
from src.jetcas.printer import format_coeff, render, to_json
from src.jetcas.series import JetSeries
from src.jetcas.solver import solve_expansion_q1, solve_expansion_q2, verify_printed_q2
from src.models.errors import ErrorCode, KernelError, raise_for
from src.models.potential import DomainSpec, check_assumptions, laplacian
from src.storage.gram_cache import GramCache
from src.storage.study_storage import StudyStorage
from src.utils.converters import complex_to_pair, jsonable
from src.utils.svg_plots import plot_error_vs_m, plot_kernel_heatmap

logger = logging.getLogger(__name__)


def _rel(a: complex, b: complex) -> float:
    return float(abs(a - b) / max(abs(b), np.finfo(float).tiny))


def _series_report(s: JetSeries) -> List[Dict[str, Any]]:
    return [{'p': p, 'pbar': pb, 'coeff': format_coeff(c)} for (p, pb), c in s.items()]


class ExperimentRunner:
    """
    Выполняет команды CLI над одной разрешенной конфигурацией.

    Все команды возвращают строки для stdout; данные пишутся в каталог вывода.
    """

    def __init__(self, run: RunConfig, out_dir: str = "out", fmt: str = "both",
                 cache: Optional[GramCache] = None):
        """
        Args:
            run: Разрешенная конфигурация
            out_dir: Каталог вывода
            fmt: 'csv', 'json' или 'both'
            cache: Кэш факторов Грама (None - без кэша)
        """
        self.run = run
        self.config = run.config_class
        self.storage = StudyStorage(out_dir, fmt, self.config)
        self.cache = cache
        self.P = run.potential()
        self.plots = bool(run.section('output')['plots'])

    # ==================== ОБЩЕЕ ====================

    def write_resolved_config(self) -> str:
        """Эхо разрешенной конфигурации (пишется всегда)"""
        return self.storage.write_json('resolved_config', self.run.resolved(), force=True)

    def source(self, kind: str, q: int, m: Optional[float], k: int = 0,
               points: Optional[List[Tuple[complex, complex]]] = None, refine: bool = False) -> KernelSource:
        """
        Источник ядра для данного m. Для gram с переданными точками измеряется
        n-уточнение; при kernel.choose_n или refine=True число степеней
        подбирается протоколом уточнения до kernel.target.
        """
        kernel = self.run.section('kernel')
        domain = self.run.domain(m)
        quad = self.run.quadrature()
        n = int(kernel['n'])
        delta = None
        if kind == 'gram' and points:
            if refine or kernel['choose_n']:
                n, delta = choose_n(domain, self.P, m, q, points, float(kernel['target']), n0=n,
                                    config=self.config, quad=quad, cache=self.cache)
                logger.info("n_chosen q=%d m=%s n=%d delta=%.3e", q, m, n, delta)
            else:
                gram_cfg = self.config.get_config('GRAM_CONFIG')
                delta = n_refinement_delta(domain, self.P, m, BasisSpec(q, n, gram_cfg['radial_blocking']), points,
                                           step=gram_cfg['refinement_step'], quad=quad, cache=self.cache,
                                           config=self.config)
        return make_source(kind, self.P, m, q, domain=domain, n=n, k=k, quad=quad, cache=self.cache,
                           threads=self.run.threads, config=self.config,
                           origin=self.run.section('symbolic')['origin'], n_refinement_delta=delta)

    def _weighted_m(self, m: Optional[float]) -> Optional[float]:
        return None if self.P is None else m

    # ==================== KERNEL ====================

    def kernel(self) -> List[str]:
        """
        Значения K(z, w) из матрицы Грама, замкнутой формулы и приближения
        с попарными относительными ошибками.
        """
        kcfg = self.run.section('kernel')
        q, k = int(kcfg['q']), int(kcfg['k'])
        m = self._weighted_m(float(kcfg['m']))
        points = self.run.kernel_points()
        sources: Dict[str, KernelSource] = {'gram': self.source('gram', q, m, points=points)}
        if kcfg['compare_closedform']:
            try:
                sources['closed'] = self.source('closedform', q, m)
            except KernelError as e:
                logger.info("closedform_unavailable reason=%s", e.message)
        if self.P is not None and q <= 2:
            try:
                sources['approx'] = self.source('approx', q, m, k=k)
            except KernelError as e:
                logger.info("approx_unavailable reason=%s", e.message)

        gram = sources['gram']
        rows = []
        for z, w in points:
            row: Dict[str, Any] = {'z': z, 'w': w, 'n': gram.n, 'n_refinement_delta': gram.n_refinement_delta}
            values = {name: complex(src.eval(z, w)) for name, src in sources.items()}
            for name, val in values.items():
                row[f"K_{name}"] = val
            names = list(values)
            for i, a in enumerate(names):
                for b in names[i + 1:]:
                    row[f"rel_{a}_{b}"] = _rel(values[a], values[b])
            rows.append(row)
        self.storage.write_table('kernel', rows)

        summary = {
            'q': q, 'm': m, 'k': k, 'n': gram.n, 'n_refinement_delta': gram.n_refinement_delta,
            'sources': {name: src.describe() for name, src in sources.items()},
            'max_rel': {key: max(r[key] for r in rows) for key in rows[0] if key.startswith('rel_')} if rows else {},
            'rows': jsonable(rows)
        }
        self.storage.write_json('kernel', summary)
        if self.plots and points:
            self._kernel_heatmap(gram, points[0][0], m)

        lines = [f"kernel q={q} m={m} points={len(rows)} sources={','.join(sources)}"]
        if gram.n_refinement_delta is not None:
            lines.append(f"  n={gram.n} n_refinement_delta={gram.n_refinement_delta:.3e}")
        for key, value in summary['max_rel'].items():
            lines.append(f"  max {key} = {value:.3e}")
        return lines

    def _kernel_heatmap(self, source: KernelSource, z: complex, m: Optional[float], size: int = 41):
        if self.P is None:
            half = 0.9 * (1.0 - abs(z))
        else:
            half = self.config.get_config('STUDY_CONFIG')['near_diagonal_factor'] * local_length_scale(self.P, m, z)
        xs = np.linspace(z.real - half, z.real + half, size)
        ys = np.linspace(z.imag - half, z.imag + half, size)
        W = xs[None, :] + 1j * ys[:, None]
        Z = np.full_like(W, z)
        if self.P is None:
            vals = np.abs(np.asarray(source.eval(Z.ravel(), W.ravel())))
        else:
            vals = np.abs(np.asarray(correlation_kernel(source, self.P, m, Z.ravel(), W.ravel())))
        plot_kernel_heatmap(self.storage.path('kernel_heatmap.svg'), xs, ys, vals.reshape(W.shape),
                            title=f"|K(z, w)|, z = {z}")

    # ==================== BLOWUP ====================

    def blowup(self) -> List[str]:
        """Исследование ошибки раздутия против предельного ядра по списку m"""
        if self.P is None:
            raise_for(ErrorCode.CONFIG_INVALID, "раздутие требует весовой потенциал")
        scfg = self.run.section('study')
        kcfg = self.run.section('kernel')
        q, kind = int(scfg['q']), scfg['source']
        z0 = self.run.point('study', 'z0')
        grid = default_blowup_grid(float(scfg['grid_radius']), int(scfg['grid_count']))
        dq = laplacian(self.P, z0)

        def source_for_m(m: float) -> KernelSource:
            scale = np.sqrt(2.0 * m * dq)
            points = [(z0 + xi / scale, z0 + eta / scale) for xi, eta in grid]
            return self.source(kind, q, m, k=int(kcfg['k']), points=points, refine=True)

        study = blowup_error_study(source_for_m, self.P, z0, grid, scfg['m_list'],
                                   signed=bool(scfg['signed']), threads=1)
        self.storage.write_table('blowup', study.rows,
                                 columns=['m', 'sup_error', 'slope_so_far', 'n', 'n_refinement_delta', 'truncation_ok'])
        self.storage.write_json('blowup', {'source': kind, 'q': q, **study.to_dict()})
        if self.plots:
            plot_error_vs_m(self.storage.path('blowup.svg'), [r['m'] for r in study.rows],
                            {'sup-ошибка раздутия': study.errors}, title=f"z0 = {z0}")
        slope = "omitted" if study.slope is None else f"{study.slope:.3f}"
        lines = [f"blowup source={kind} z0={z0} slope={slope} in_band={study.slope_in_band} "
                 f"decreasing={study.strictly_decreasing} flags={','.join(study.flags) or '-'}"]
        lines += [f"  m={r['m']:g} sup_error={r['sup_error']:.6e}"
                  + (f" n={r['n']} n_refinement_delta={r['n_refinement_delta']:.3e}" if r['n'] is not None else "")
                  for r in study.rows]
        return lines

    # ==================== METRICS ====================

    def metrics(self) -> List[str]:
        """
        Классические и полианалитические метрики в точке metrics.z;
        для весовых ядер также перемасштабированное исследование по m.
        """
        mcfg = self.run.section('metrics')
        q = int(self.run.section('kernel')['q'])
        z = self.run.point('metrics', 'z')
        eps_primes = self.run.points('metrics', 'eps_primes')
        m_values: List[Optional[float]] = [None] if self.P is None else [float(m) for m in mcfg['m_list']]
        refine = bool(mcfg['richardson'])

        rows = []
        for m in m_values:
            source = self.source(mcfg['source'], q, m)
            scale = local_length_scale(self.P, m, z)
            A = poly_metric1_matrix(source.lift, source.weight, q, z, h=default_step(scale),
                                    method=mcfg['method'])
            eig = np.linalg.eigvalsh(A)
            row: Dict[str, Any] = {
                'm': m,
                'metric1': metric1_density(source.diag, source.weight, z),
                'metric2': metric2_density(source.diag, z, default_step(scale), refine=refine),
                'matrix_trace': float(np.real(np.trace(A))),
                'eig_min': float(eig[0]),
                'eig_max': float(eig[-1])
            }
            for i in range(q):
                for j in range(q):
                    row[f"A{i}{j}"] = complex(A[i, j])
            if self.P is not None and q == 2 and eps_primes:
                eps = eps_primes[0] * scale
                row['poly_density'] = poly_metric1_density(source.lift, source.weight, z, eps)
                row['approx_density'] = approx_double_diagonal(self.P, m, z, eps)
            rows.append(row)
        self.storage.write_table('metrics', rows)
        summary: Dict[str, Any] = {'source': mcfg['source'], 'q': q, 'z': complex_to_pair(z), 'rows': jsonable(rows)}

        lines = [f"metrics source={mcfg['source']} q={q} z={z}"]
        for r in rows:
            lines.append(f"  m={r['m']} metric1={r['metric1']:.10g} metric2={r['metric2']:.10g} "
                         f"eig=[{r['eig_min']:.6g}, {r['eig_max']:.6g}]")

        if self.P is not None and q == 2 and eps_primes:
            study = rescaled_metric_study(lambda m: self.source(mcfg['source'], 2, m), self.P, z, eps_primes,
                                          m_values, second=bool(mcfg['second']), threads=1)
            self.storage.write_table('rescaled_metrics', study.rows)
            summary['rescaled'] = study.to_dict()
            if self.plots:
                plot_error_vs_m(self.storage.path('rescaled_metrics.svg'), study.column('m'),
                                {name: study.column(name) for name in study.slopes},
                                title="перемасштабированные метрики", ylabel="sup-ошибка")
            for r in study.rows:
                lines.append("  rescaled " + " ".join(f"{key}={val:.6e}" for key, val in r.items() if key != 'm')
                             + f" (m={r['m']:g})")
        self.storage.write_json('metrics', summary)
        return lines

    # ==================== BOUNDS ====================

    def bounds(self) -> List[str]:
        """Рандомизированная проверка оценок точечных значений"""
        trials = int(self.run.section('bounds')['trials'])
        report = run_bounds_harness(trials, seed=self.run.seed, threads=self.run.threads)
        report['green_unit_density'] = green_potential_origin(lambda rho: np.ones_like(rho))
        rows = [{'check': name, **{k: v for k, v in body.items() if k != 'failing_seeds'}}
                for name, body in report['checks'].items()]
        self.storage.write_table('bounds', rows, columns=['check', 'trials', 'max_ratio', 'violations'])
        self.storage.write_json('bounds', report)
        lines = [f"bounds trials={trials} seed={self.run.seed} all_hold={report['all_hold']}"]
        lines += [f"  {r['check']}: max_ratio={r['max_ratio']:.6f} violations={r['violations']}"
                  + (" informational" if r['informational'] else "") for r in rows]
        return lines

    # ==================== SYMBOLIC ====================

    def symbolic(self, action: str, q: Optional[int] = None, order: Optional[int] = None) -> List[str]:
        """
        Символьный движок: solve, verify или identities.

        Отчет verify с ненулевым остатком - результат, а не ошибка.
        """
        scfg = self.run.section('symbolic')
        q = int(q if q is not None else scfg['q'])
        order = int(order if order is not None else scfg['max_order'])
        T = int(scfg['truncation'])
        if action == 'solve':
            coeffs = solve_expansion_q1(order) if q == 1 else self._solve_q2(order, T)
            data = to_json(coeffs, q)
            self.storage.write_json('symbolic_solve', data)
            return render(coeffs, q, pretty=bool(scfg['pretty']))
        if action == 'verify':
            report = self._verify(q, order, T)
            self.storage.write_json('symbolic_verify', report)
            return [f"verify q={q} order={order} residual_zero={report['residual_zero']}"] + [
                f"  {key}: {value}" for key, value in report.items()
                if key not in ('residual_zero', 's_residual', 'sprime_residual')]
        if action == 'identities':
            trials = int(scfg['identity_trials'])
            report = run_identity_checks(seed=self.run.seed, trials=trials, T=T)
            self.storage.write_json('symbolic_identities', report)
            return [f"identities seed={report['seed']} trials={report['trials']} all_passed={report['all_passed']}"] + [
                f"  {name}: {'pass' if ok else 'FAIL'}" for name, ok in report['results'].items()]
        raise_for(ErrorCode.CONFIG_INVALID, f"неизвестное действие: {action}", action=action)

    def _solve_q2(self, order: int, T: int):
        if order > self.config.get_config('JETCAS_CONFIG')['max_q2_order']:
            raise_for(ErrorCode.ORDER_UNAVAILABLE, "порядок для q=2 недоступен", order=order)
        return solve_expansion_q2(order, max(T, 2 * order + 3))

    def _verify(self, q: int, order: int, T: int) -> Dict[str, Any]:
        if q == 2:
            report = verify_printed_q2(order, max(T, 2 * order + 3))
            report['s_residual'] = _series_report(report['s_residual'])
            report['sprime_residual'] = _series_report(report['sprime_residual'])
            if 'solved_minus_printed' in report:
                report['solved_minus_printed'] = {k: format_coeff(c)
                                                  for k, c in report['solved_minus_printed'].items()}
            return report
        if q == 1:
            solved = solve_expansion_q1(order)
            printed = coefficient_set(1, min(order, 1), origin='printed').coeffs
            diffs = {f"L{j}": solved[j] - printed[j] for j in range(len(printed))}
            return {'order': order, 'residual_zero': all(d.is_zero() for d in diffs.values()),
                    'solved_minus_printed': {k: format_coeff(d) for k, d in diffs.items()}}
        raise_for(ErrorCode.ORDER_UNAVAILABLE, "проверка реализована для q = 1, 2", q=q)

    # ==================== ASSUMPTIONS ====================

    def assumptions(self) -> List[str]:
        """Проверка условий на потенциал в диске области (или в единичном диске)"""
        if self.P is None:
            raise_for(ErrorCode.CONFIG_INVALID, "проверка предположений требует потенциал")
        acfg = self.config.get_config('ASSUMPTIONS_CONFIG')
        m = float(self.run.section('kernel')['m'])
        domain = self.run.domain(m)
        if domain.kind != 'disk':
            domain = DomainSpec.unit_disk(m)
        report = check_assumptions(self.P, domain, m, n_radii=acfg['grid_radii'], n_angles=acfg['grid_angles'])
        data = report.to_dict()
        self.storage.write_table('assumptions', [{k: v for k, v in data.items() if not isinstance(v, (list, dict))}])
        self.storage.write_json('assumptions', data)
        return [f"assumptions epsilon0={report.epsilon0:.6g} kappa={report.kappa:.6g} delta0={report.delta0:.6g} "
                f"a3={report.a3_holds} a4={report.a4_holds}"]

    # ==================== CACHE ====================

    def cache_inspect(self) -> List[str]:
        cache = self.cache or GramCache()
        entries = cache.inspect()
        self.storage.write_json('cache_inspect', {'directory': cache.directory, 'entries': entries})
        return [f"cache {cache.directory}: {len(entries)} entries"] + [
            f"  {e['key'][:16]} q={e.get('q')} n={e.get('n')} m={e.get('m')} bytes={e['bytes']} valid={e['valid']}"
            for e in entries]

    def cache_clear(self) -> List[str]:
        cache = self.cache or GramCache()
        return [f"cache {cache.directory}: removed {cache.clear()} entries"]

