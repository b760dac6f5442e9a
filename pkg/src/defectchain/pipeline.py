"""End-to-end verification pipeline.

The stages run in order

    derive-fsymbols → pentagon-check → build-hamiltonian → compare-tfim → acceptance

and each returns a JSON-ready record with a ``passed`` flag. :func:`run_reproduce`
stops at the first failing stage, writes the partial ``report.json`` and returns a
nonzero exit code. The acceptance stage evaluates eight fixed checks
(:data:`CRITERIA`), each of which can also be called on its own.

Reports contain no wall-clock times, so they are byte-identical between runs.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path

from .bimodule import catalog, check_module_coherence, vec_zp_bimodule
from .chain import Boundary, defect_chain_hamiltonian, free_sectors, golden_chain_hamiltonian
from .fusion import STAR, FusionCategory, check_pentagon, ising, vec_zp
from .io import resolve_bimodule, resolve_category, write_json, write_matrix_market, read_json
from .scalar import Scalar
from .spectra import (COMPARE_TOL, DEGENERACY_TOL, compare_spectra, diagonalize, free_fermion_energy,
                      richardson_extrapolate, tfim_energy_density, tfim_reference, z2_flip_permutation)
from .tube import (AnnularCategory, TubeAlgebra, derive_extended_fsymbols, primitive_idempotents)

__all__ = ['PipelineConfig', 'ConfigError', 'CRITERIA', 'run_reproduce', 'thread_count',
           'criterion_pentagon', 'criterion_bimodules', 'criterion_tube', 'criterion_fsymbols',
           'criterion_spectral', 'criterion_two_copies', 'criterion_criticality', 'criterion_ground_states',
           'spectral_match', 'two_copies_match']

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    """Validated settings of a reproduce run.

    Attributes
    ----------
    category, bimodule : str
        Builtin names (``'vecz2'``, ``'F1'``) or JSON file paths.
    kappa : int
        Frobenius–Schur sign ``±1`` of the derived table and of the chain.
    sizes : list of int
        Qubit numbers ``k``; the defect chain has ``2k+1`` edges.
    boundary : str
        Boundary of the spectral comparison (``'*,*'``).
    compare_tol, degeneracy_tol : float
    fsymbols : str or None
        Optional F-symbol file used instead of the derived table downstream.
    output_dir : str
    """
    category: str = 'vecz2'
    bimodule: str = 'F1'
    kappa: int = 1
    sizes: list = field(default_factory=lambda: list(range(1, 9)))
    boundary: str = '*,*'
    compare_tol: float = COMPARE_TOL
    degeneracy_tol: float = DEGENERACY_TOL
    fsymbols: str | None = None
    output_dir: str = 'reproduce-out'

    @classmethod
    def from_dict(cls, data: dict) -> 'PipelineConfig':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> 'PipelineConfig':
        data = read_json(path) if path else {}
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data)

    def validate(self):
        if self.kappa not in (1, -1):
            raise ConfigError("kappa must be +1 or -1")
        if not isinstance(self.sizes, list) or any(not isinstance(k, int) or k < 1 for k in self.sizes):
            raise ConfigError("sizes must be a list of positive integers")
        if any(k > 11 for k in self.sizes):
            raise ConfigError("sizes above 11 qubits exceed the dense-diagonalization limit")
        if self.boundary != '*,*':
            raise ConfigError("the spectral comparison is defined for the fixed '*,*' boundary")
        for name in ('compare_tol', 'degeneracy_tol'):
            if not float(getattr(self, name)) > 0:
                raise ConfigError(f"{name} must be positive")

    def to_json(self) -> dict:
        return asdict(self)


def thread_count() -> int:
    """Worker bound from ``DEFECTCHAIN_THREADS`` (default: number of CPUs)."""
    env = os.environ.get('DEFECTCHAIN_THREADS')
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError("DEFECTCHAIN_THREADS must be a positive integer") from None
        if n < 1:
            raise ConfigError("DEFECTCHAIN_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _pmap(fn, items):
    items = list(items)
    n = min(thread_count(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------- spectral building blocks

def spectral_match(k: int, kappa=1, tol: float = COMPARE_TOL, category: FusionCategory | None = None) -> dict:
    """Defect chain on ``2k+1`` edges, fixed ``(*,*)``, against the Ising reference on ``k`` qubits."""
    H = defect_chain_hamiltonian(2 * k + 1, '*,*', kappa=kappa, category=category)
    T = tfim_reference(k)
    rep = compare_spectra(diagonalize(H), diagonalize(T), tol)
    return {'qubits': k, 'n_edges': 2 * k + 1, 'dim': H.dim, 'equal': rep['equal'],
            'max_deviation': rep['max_deviation'], 'unmatched': rep['unmatched'],
            'term_counts': {'defect_chain': H.metadata['term_counts'], 'reference': T.metadata['term_counts']}}


def two_copies_match(n_edges: int, kappa=1, tol: float = COMPARE_TOL) -> dict:
    """Free-boundary spectrum against the union of the two fixed-boundary sector spectra."""
    free = diagonalize(defect_chain_hamiltonian(n_edges, 'free', kappa=kappa))
    s1, s2 = (diagonalize(defect_chain_hamiltonian(n_edges, b, kappa=kappa)) for b in free_sectors(n_edges))
    rep = compare_spectra(free, s1, tol, union_with=s2)
    return {'n_edges': n_edges, 'sectors': [str(b) for b in free_sectors(n_edges)], 'dim': len(free),
            'equal': rep['equal'], 'max_deviation': rep['max_deviation'], 'unmatched': rep['unmatched']}


# --------------------------------------------------------------------------- acceptance checks

def criterion_pentagon() -> dict:
    cats = {f'vec_zp({p})': vec_zp(p) for p in (1, 2, 3, 5)}
    cats['ising(+1)'] = ising(1)
    cats['ising(-1)'] = ising(-1)
    results = {name: check_pentagon(C) for name, C in cats.items()}
    key = (STAR, STAR, STAR, STAR, 0, 0)
    base = ising(1)
    mutant = base.with_fsymbol(key, -base.F(*key))
    mres = check_pentagon(mutant)
    details = {name: {'ok': r['ok'], 'checked': r['checked'], 'violations': len(r['violations'])}
               for name, r in results.items()}
    details['mutant ising(+1) F[***;*]_{0,0} sign flip'] = {'detected': not mres['ok'],
                                                           'violations': len(mres['violations'])}
    passed = all(r['ok'] for r in results.values()) and not mres['ok']
    return {'passed': passed, 'details': details}


def criterion_bimodules() -> dict:
    details, passed = {}, True
    for p in (2, 3, 5):
        for name, M in catalog(p).items():
            ok = check_module_coherence(M)['ok']
            details[f'Z/{p}:{name}'] = ok
            passed &= ok
    F1 = vec_zp_bimodule(2, 'F1')
    mixed = all(F1.Cphase(a, '*', b) == (-1) ** (a * b) for a in (0, 1) for b in (0, 1))
    details['F1 middle associator = (-1)^(ab)'] = mixed
    return {'passed': passed and mixed, 'details': details}


def criterion_tube() -> dict:
    F1 = vec_zp_bimodule(2, 'F1')
    ann = AnnularCategory(F1, F1, vec_zp_bimodule(2, 'X1'))
    A = TubeAlgebra(ann, (STAR, STAR, 0))
    # T_{a,b}: arc a on both outer sectors, b on the sector between the two defect strands
    T = {(a, b): A.basis.index((a, b, a)) for a in (0, 1) for b in (0, 1)}
    one = Scalar.one(A.order)
    group_law = True
    for (a, b), (c, d) in itertools.product(T, repeat=2):
        prod = A.mul(A.basis_element(T[(a, b)]), A.basis_element(T[(c, d)]))
        expect = A.basis_element(T[((a + c) % 2, (b + d) % 2)])
        group_law &= prod == expect
    idems = primitive_idempotents(A)
    quarter = one / 4
    expected = set()
    for x, y in itertools.product((0, 1), repeat=2):
        vec = [Scalar(A.order)] * A.dim
        for (a, b), i in T.items():
            vec[i] = quarter * (-1) ** (a * x + b * y)
        expected.add(tuple(vec))
    found = {tuple(it['idempotent']) for it in idems}
    details = {'algebra_dim': A.dim, 'commutative': A.is_commutative(), 'group_law': group_law,
               'n_idempotents': len(idems), 'idempotents_match': found == expected}
    passed = A.dim == 4 and details['commutative'] and group_law and len(idems) == 4 and found == expected
    return {'passed': passed, 'details': details}


def criterion_fsymbols(category='vecz2', bimodule='F1') -> dict:
    C = resolve_category(category)
    M = resolve_bimodule(bimodule, C)
    details, passed = {}, True
    for kappa in (1, -1):
        D = derive_extended_fsymbols(C, M, kappa)
        ref = ising(kappa, D.order)
        equal = D.same_data(ref)
        pent = check_pentagon(D)['ok']
        details[f'kappa={kappa:+d}'] = {'equals_ising_table': equal, 'pentagon': pent,
                                        'entries': len(D.fsymbols)}
        passed &= equal and pent
    return {'passed': passed, 'details': details}


def criterion_spectral(sizes=range(1, 11), kappa=1, tol: float = COMPARE_TOL,
                       category: FusionCategory | None = None) -> dict:
    rows = _pmap(lambda k: spectral_match(k, kappa, tol, category), sizes)
    return {'passed': all(r['equal'] for r in rows), 'vacuous': not rows, 'details': rows}


def criterion_two_copies(sizes=range(1, 9), kappa=1, tol: float = COMPARE_TOL) -> dict:
    edges = sorted({n for k in sizes if k <= 8 for n in (2 * k + 1, 2 * k + 2)})
    rows = _pmap(lambda n: two_copies_match(n, kappa, tol), edges)
    return {'passed': all(r['equal'] for r in rows), 'vacuous': not rows, 'details': rows}


def criterion_criticality(rel_tol: float = 1e-3, dense_tol: float = 1e-10, dense_max: int = 12) -> dict:
    ns = [64, 128, 256]
    per_site = [free_fermion_energy(n) / n for n in ns]
    extrapolated = richardson_extrapolate(ns, per_site)
    target = tfim_energy_density()
    rel = abs(extrapolated - target) / abs(target)
    dense = []
    for n in range(1, dense_max + 1):
        T = tfim_reference(n, identity_terms=n)
        e = diagonalize(T, symmetry=z2_flip_permutation(T.basis)).ground_energy
        dense.append(abs(e - free_fermion_energy(n)))
    worst = max(dense)
    details = {'n': ns, 'energy_per_site': per_site, 'extrapolated': extrapolated, 'target': target,
               'relative_error': rel, 'dense_vs_free_fermion_max': worst}
    return {'passed': rel < rel_tol and worst < dense_tol, 'details': details}


def criterion_ground_states(n_sites: int = 8, tol: float = DEGENERACY_TOL) -> dict:
    C = vec_zp(2)
    details, passed = {}, True
    for bnd, expected in ((Boundary.fixed(0, 0), 1), (Boundary.fixed(1, 1), 1), (Boundary.periodic(), 2)):
        H = golden_chain_hamiltonian(C, 1, n_sites, bnd)
        s = diagonalize(H)
        s = type(s)(s.eigenvalues, s.source, tol)
        deg = s.ground_degeneracy
        details[str(bnd)] = {'dim': len(s), 'ground_energy': s.ground_energy, 'ground_degeneracy': deg}
        passed &= deg == expected
    return {'passed': passed, 'details': details}


CRITERIA = {
    1: ('pentagon suite', criterion_pentagon),
    2: ('bimodule coherence', criterion_bimodules),
    3: ('tube algebra idempotents', criterion_tube),
    4: ('F-symbol derivation', criterion_fsymbols),
    5: ('spectral equivalence with the Ising chain', criterion_spectral),
    6: ('free boundary = two Ising copies', criterion_two_copies),
    7: ('criticality indicator', criterion_criticality),
    8: ('pure-chain ground-state counting', criterion_ground_states),
}


# --------------------------------------------------------------------------- reproduce

def _acceptance(cfg: PipelineConfig) -> list[dict]:
    args = {
        4: dict(category=cfg.category, bimodule=cfg.bimodule),
        5: dict(sizes=cfg.sizes, kappa=cfg.kappa, tol=cfg.compare_tol),
        6: dict(sizes=cfg.sizes, kappa=cfg.kappa, tol=cfg.compare_tol),
        8: dict(tol=cfg.degeneracy_tol),
    }
    out = []
    for cid, (name, fn) in CRITERIA.items():
        res = fn(**args.get(cid, {}))
        logger.info("criterion %d (%s): %s", cid, name, 'PASS' if res['passed'] else 'FAIL')
        out.append({'id': cid, 'name': name, **res})
    return out


def run_reproduce(cfg: PipelineConfig, echo=print) -> int:
    """Run every stage, write ``<output_dir>/report.json``; return 0 iff everything passed."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    # the output location is not an input of the computation: keep it out of the artifacts
    config = {k: v for k, v in cfg.to_json().items() if k != 'output_dir'}
    report = {'config': config, 'stages': [], 'criteria': [], 'passed': False}

    def finish(code):
        write_json(out / 'report.json', report, config)
        return code

    def stage(name, fn):
        try:
            rec = fn()
        except Exception as exc:  # a crashing stage is a failing stage
            rec = {'passed': False, 'error': f'{type(exc).__name__}: {exc}'}
        report['stages'].append({'stage': name, **rec})
        echo(f"[{'PASS' if rec['passed'] else 'FAIL'}] stage {name}")
        return rec['passed']

    C = resolve_category(cfg.category)
    M = resolve_bimodule(cfg.bimodule, C)
    state = {}

    def derive():
        D = derive_extended_fsymbols(C, M, cfg.kappa)
        write_json(out / 'fsymbols.json', D.to_json(), config)
        state['table'] = D
        rec = {'passed': True, 'labels': list(D.labels), 'entries': len(D.fsymbols), 'file': 'fsymbols.json'}
        if cfg.fsymbols:
            state['table'] = resolve_category(cfg.fsymbols)
            rec['override'] = cfg.fsymbols
            rec['override_equals_derived'] = state['table'].same_data(D)
        return rec

    def pentagon():
        r = check_pentagon(state['table'])
        return {'passed': r['ok'], 'checked': r['checked'], 'violations': len(r['violations'])}

    def build():
        files = []
        for k in cfg.sizes:
            H = defect_chain_hamiltonian(2 * k + 1, cfg.boundary, kappa=cfg.kappa, category=state['table'])
            name = f'H_defect_k{k}.mtx'
            write_matrix_market(out / 'hamiltonians' / name, H, config)
            files.append({'qubits': k, 'n_edges': 2 * k + 1, 'dim': H.dim, 'file': f'hamiltonians/{name}',
                          'hermitian': H.is_hermitian()})
        return {'passed': all(f['hermitian'] for f in files), 'vacuous': not files, 'hamiltonians': files}

    def compare():
        res = criterion_spectral(cfg.sizes, cfg.kappa, cfg.compare_tol, state['table'])
        return {'passed': res['passed'], 'vacuous': res['vacuous'], 'comparisons': res['details']}

    def acceptance():
        report['criteria'] = _acceptance(cfg)
        for c in report['criteria']:
            echo(f"[{'PASS' if c['passed'] else 'FAIL'}] criterion {c['id']}: {c['name']}")
        return {'passed': all(c['passed'] for c in report['criteria'])}

    for name, fn in (('derive-fsymbols', derive), ('pentagon-check', pentagon), ('build-hamiltonian', build),
                     ('compare-tfim', compare), ('acceptance', acceptance)):
        if not stage(name, fn):
            return finish(1)
    report['passed'] = True
    return finish(0)
