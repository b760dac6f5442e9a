"""Command-line interface: ``defectchain <subcommand> …``.

Every subcommand prints a JSON document (or writes it with ``--out``) carrying a
``"provenance"`` block, and exits with status 0 on success, 1 when a check fails
and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .bimodule import catalog, check_module_coherence
from .chain import defect_chain_hamiltonian, golden_chain_hamiltonian, parse_boundary
from .fusion import check_pentagon, check_qdims, check_unitarity
from .io import (dumps, provenance, read_matrix_market, resolve_bimodule, resolve_category, write_json,
                 write_matrix_market)
from .pipeline import ConfigError, PipelineConfig, run_reproduce, spectral_match
from .spectra import COMPARE_TOL, Spectrum, diagonalize
from .tube import (AnnularCategory, TubeAlgebra, derive_extended_fsymbols, primitive_idempotents,
                   vertex_basis)

__all__ = ['main', 'build_parser']


def _emit(args, payload: dict, config: dict) -> None:
    if getattr(args, 'out', None):
        write_json(args.out, payload, config)
    else:
        doc = {'provenance': provenance(config)}
        doc.update(payload)
        sys.stdout.write(dumps(doc))


def _label(tok: str):
    tok = tok.strip()
    return int(tok) if tok.lstrip('-').isdigit() else tok


def _vec_json(vec):
    return [s.to_json() for s in vec]


# --------------------------------------------------------------------------- subcommands

def cmd_pentagon_check(args) -> int:
    C = resolve_category(args.category)
    rep = check_pentagon(C)
    payload = {'category': C.name, 'ok': rep['ok'], 'checked': rep['checked'],
               'violations': [list(v) if isinstance(v, tuple) else v for v in rep['violations'][:args.max_report]],
               'n_violations': len(rep['violations']),
               'unitary': check_unitarity(C)['ok'], 'qdims_consistent': check_qdims(C)['ok']}
    _emit(args, payload, {'command': 'pentagon-check', 'category': args.category})
    return 0 if rep['ok'] else 1


def cmd_bimodule_check(args) -> int:
    if args.catalog:
        mods = {f'Z/{args.catalog}:{k}': v for k, v in catalog(args.catalog).items()}
    elif args.bimodule:
        mods = {args.bimodule: resolve_bimodule(args.bimodule, resolve_category(args.category))}
    else:
        raise ConfigError("give a bimodule (name or file) or --catalog P")
    results = {}
    for name, M in mods.items():
        rep = check_module_coherence(M)
        results[name] = {k: (v if isinstance(v, bool) else len(v)) for k, v in rep.items()}
    ok = all(r['ok'] for r in results.values())
    _emit(args, {'ok': ok, 'results': results},
          {'command': 'bimodule-check', 'bimodule': args.bimodule, 'category': args.category,
           'catalog': args.catalog})
    return 0 if ok else 1


def cmd_tube_idempotents(args) -> int:
    C = resolve_category(args.category)
    M, N, P = (resolve_bimodule(x, C) for x in (args.M, args.N, args.P))
    ann = AnnularCategory(M, N, P)
    classes = ann.object_classes()
    if args.object:
        rep = tuple(_label(t) for t in args.object.split(','))
        if not any(rep == r for r, _ in classes):
            raise ConfigError(f"{rep} is not an object-class representative; "
                              f"choose from {[list(r) for r, _ in classes]}")
    else:
        rep = classes[0][0]
    A = TubeAlgebra(ann, rep)
    idems = primitive_idempotents(A)
    blocks, out_idems = [], []
    for it in idems:
        blocks.append({'dim': it['block_dim'], 'character': _vec_json(it['character'])})
        entry = {'coefficients': _vec_json(it['idempotent'])}
        if args.vertices:
            entry['vertices'] = {
                str(a): [[[list(arcs), c.to_json()] for arcs, c in sorted(v['vector'].items())]
                         for v in vertex_basis(A, it['idempotent'], a)]
                for a in P.objects if isinstance(a, int)}
        out_idems.append(entry)
    payload = {'object_class': list(rep), 'basis': [list(b) for b in A.basis], 'algebra_dim': A.dim,
               'commutative': A.is_commutative(), 'blocks': blocks, 'idempotents': out_idems}
    _emit(args, payload, {'command': 'tube-idempotents', 'category': args.category, 'M': args.M,
                          'N': args.N, 'P': args.P, 'object': list(rep), 'vertices': args.vertices})
    return 0


def cmd_derive_fsymbols(args) -> int:
    C = resolve_category(args.category)
    M = resolve_bimodule(args.bimodule, C)
    D = derive_extended_fsymbols(C, M, args.kappa)
    rep = check_pentagon(D)
    payload = D.to_json()
    payload['pentagon_ok'] = rep['ok']
    _emit(args, payload, {'command': 'derive-fsymbols', 'category': args.category,
                          'bimodule': args.bimodule, 'kappa': args.kappa})
    return 0 if rep['ok'] else 1


def cmd_build_hamiltonian(args) -> int:
    config = {'command': 'build-hamiltonian', 'model': args.model, 'edges': args.edges, 'sites': args.sites,
              'boundary': args.boundary, 'kappa': args.kappa, 'category': args.category, 'label': args.label}
    if args.model == 'defect-z2':
        if args.edges is None:
            raise ConfigError("--edges is required for the defect-z2 model")
        cat = resolve_category(args.category) if args.category else None
        H = defect_chain_hamiltonian(args.edges, args.boundary, kappa=args.kappa, category=cat)
    else:
        if args.sites is None or args.label is None or args.category is None:
            raise ConfigError("--category, --label and --sites are required for the golden model")
        H = golden_chain_hamiltonian(resolve_category(args.category), _label(args.label), args.sites,
                                     parse_boundary(args.boundary))
    if H.dim == 0:
        print(f"warning: empty basis ({H.basis.flag})", file=sys.stderr)
    mtx, side = write_matrix_market(args.out, H, config)
    print(dumps({'matrix': str(mtx), 'basis': str(side), 'dim': H.dim, 'nnz': int(H.matrix.nnz)}), end='')
    return 0


def cmd_spectrum(args) -> int:
    m, meta = read_matrix_market(args.matrix)
    source = {'file': Path(args.matrix).name, **meta.get('metadata', {})}
    if args.lanczos:
        spec = diagonalize(m, 'lanczos_lowk', k=args.lanczos, source=source)
    else:
        spec = diagonalize(m, 'dense_full', source=source)
    spec = Spectrum(spec.eigenvalues, spec.source, args.degeneracy_tol)
    _emit(args, spec.to_json(), {'command': 'spectrum', 'matrix': Path(args.matrix).name,
                                 'lanczos': args.lanczos, 'degeneracy_tol': args.degeneracy_tol})
    return 0


def cmd_compare_tfim(args) -> int:
    if args.edges < 3 or args.edges % 2 == 0:
        raise ConfigError("--edges must be odd and ≥ 3 (2k+1 edges carry k qubits)")
    k = (args.edges - 1) // 2
    res = spectral_match(k, args.kappa, args.tol)
    _emit(args, res, {'command': 'compare-tfim', 'edges': args.edges, 'kappa': args.kappa, 'tol': args.tol})
    return 0 if res['equal'] else 1


def cmd_reproduce(args) -> int:
    overrides = {'kappa': args.kappa, 'sizes': args.sizes, 'output_dir': args.out_dir,
                 'compare_tol': args.tol, 'fsymbols': args.fsymbols, 'category': args.category,
                 'bimodule': args.bimodule}
    cfg = PipelineConfig.from_file(args.config, overrides)
    code = run_reproduce(cfg)
    print(f"report: {Path(cfg.output_dir) / 'report.json'}")
    print('ALL CHECKS PASSED' if code == 0 else 'CHECKS FAILED')
    return code


# --------------------------------------------------------------------------- parser

def _kappa(s: str) -> int:
    v = int(s)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("kappa must be +1 or -1")
    return v


def _sizes(s: str) -> list[int]:
    """``'1-8'``, ``'1,2,5'`` or ``''`` (empty list)."""
    out = []
    for part in filter(None, (p.strip() for p in s.split(','))):
        if '-' in part:
            lo, hi = part.split('-', 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog='defectchain', description=__doc__.splitlines()[0])
    p.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    p.add_argument('-v', '--verbose', action='store_true', help='log progress to stderr')
    sub = p.add_subparsers(dest='command', required=True)

    s = sub.add_parser('pentagon-check', help='check the pentagon identity of a fusion category')
    s.add_argument('category', help="builtin ('vecz2', 'ising', 'ising-1') or category JSON file")
    s.add_argument('--max-report', type=int, default=20, help='violations listed in the output')
    s.add_argument('--out')
    s.set_defaults(func=cmd_pentagon_check)

    s = sub.add_parser('bimodule-check', help='check bimodule coherence')
    s.add_argument('bimodule', nargs='?', help="catalog name ('F1', 'vecz3:X2') or bimodule JSON file")
    s.add_argument('--category', default='vecz2', help='category of a catalog name')
    s.add_argument('--catalog', type=int, metavar='P', help='check every catalog bimodule over Z/P')
    s.add_argument('--out')
    s.set_defaults(func=cmd_bimodule_check)

    s = sub.add_parser('tube-idempotents', help='tube algebra and its primitive idempotents')
    s.add_argument('--category', default='vecz2')
    s.add_argument('--M', default='F1', help='first incoming strand bimodule')
    s.add_argument('--N', default='F1', help='second incoming strand bimodule')
    s.add_argument('--P', default='X1', help='outgoing strand bimodule')
    s.add_argument('--object', help="object-class representative, e.g. '*,*,0' (default: first class)")
    s.add_argument('--vertices', action='store_true', help='also list vertex bases per outgoing label')
    s.add_argument('--out')
    s.set_defaults(func=cmd_tube_idempotents)

    s = sub.add_parser('derive-fsymbols', help='derive the extended F-symbol table from a defect bimodule')
    s.add_argument('--category', default='vecz2')
    s.add_argument('--bimodule', default='F1')
    s.add_argument('--kappa', type=_kappa, default=1)
    s.add_argument('--out')
    s.set_defaults(func=cmd_derive_fsymbols)

    s = sub.add_parser('build-hamiltonian', help='assemble a chain Hamiltonian (Matrix Market + basis JSON)')
    s.add_argument('--model', choices=('defect-z2', 'golden'), default='defect-z2')
    s.add_argument('--edges', type=int, help='number of edges (defect-z2)')
    s.add_argument('--sites', type=int, help='number of strands (golden)')
    s.add_argument('--boundary', default='*,*', help="'l,r' (labels or 'c' for any category label), "
                                                     "'free' or 'periodic'")
    s.add_argument('--kappa', type=_kappa, default=1)
    s.add_argument('--category', help='category (golden) or F-symbol table override (defect-z2)')
    s.add_argument('--label', help='strand label X (golden)')
    s.add_argument('--out', required=True)
    s.set_defaults(func=cmd_build_hamiltonian)

    s = sub.add_parser('spectrum', help='diagonalize a Matrix Market Hamiltonian')
    s.add_argument('matrix')
    g = s.add_mutually_exclusive_group()
    g.add_argument('--dense', action='store_true', help='full spectrum (default)')
    g.add_argument('--lanczos', type=int, metavar='K', help='K lowest eigenvalues by Lanczos')
    s.add_argument('--degeneracy-tol', type=float, default=1e-8)
    s.add_argument('--out')
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser('compare-tfim', help='compare the defect chain with the Ising reference')
    s.add_argument('--edges', type=int, required=True)
    s.add_argument('--kappa', type=_kappa, default=1)
    s.add_argument('--tol', type=float, default=COMPARE_TOL)
    s.add_argument('--out')
    s.set_defaults(func=cmd_compare_tfim)

    s = sub.add_parser('reproduce', help='run the full pipeline and write report.json')
    s.add_argument('--config', help='JSON config file; flags override its values')
    s.add_argument('--out-dir')
    s.add_argument('--kappa', type=_kappa)
    s.add_argument('--sizes', type=_sizes, help="qubit numbers, e.g. '1-8' or '1,3,5'")
    s.add_argument('--tol', type=float)
    s.add_argument('--category')
    s.add_argument('--bimodule')
    s.add_argument('--fsymbols', help='F-symbol table file to use instead of the derived one')
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError, NotImplementedError) as exc:
        print(f"defectchain {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())
