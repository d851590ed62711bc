"""Command-line front end: ``relph <subcommand> ...``.

Exit codes: 0 success (per-file errors recorded when keeping going),
1 configuration or input error, 2 fatal I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace
from functools import partial
from pathlib import Path

import numpy as np

from . import datagen as dg
from . import io as rio
from . import pipelines, svg
from .errors import RelphError
from .features import (DOWKER_BLOCKS, DOWKER_PAIRS, SIMPLE_NAMES, VR_BLOCKS, dowker_diagrams,
                       fit_specs, simple_descriptor, vectorize, vr_diagrams, witness_entry_names,
                       witness_species_points, witness_vector)
from .filtrations import dowker_pair, vietoris_rips, witness_filtration
from .geometry import delaunay_2d, within_distances
from .images import ImageSpec, fit_image_spec, persistence_image
from .metrics import distance
from .persistence import diagrams as compute_diagrams

log = logging.getLogger("relph")


class ConfigError(RelphError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    env = os.environ.get("RELPH_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"RELPH_SEED must be an integer, got {env!r}") from None
    return int(args.seed)


def _inputs(paths, suffix=".csv") -> list:
    files = []
    for p in map(Path, paths):
        if p.is_dir():
            files += sorted(f for f in p.iterdir() if f.suffix == suffix and not f.name.startswith("."))
        elif p.exists():
            files.append(p)
        else:
            raise ConfigError(f"input not found: {p}")
    if not files:
        raise ConfigError("no input files")
    return files


def _guard(fn, path):
    """Run ``fn(path)``; turn data errors into an error record."""
    try:
        return ("ok", fn(path))
    except (RelphError, ValueError) as exc:
        return ("error", f"{type(exc).__name__}: {exc}")


def _batch(fn, files, args) -> tuple:
    """(results by file, error records); raises on the first error when failing fast."""
    outcomes = pipelines.pmap(partial(_guard, fn), files, args.jobs)
    ok, errors = {}, []
    for f, (status, val) in zip(files, outcomes):
        if status == "ok":
            ok[f] = val
        else:
            if args.fail_fast:
                raise RelphError(f"{f}: {val}")
            log.error("%s: %s", f, val)
            errors.append({"file": str(f), "error": val})
    return ok, errors


# -- generate -------------------------------------------------------------------------------

def _manifest_entry(cid, params=None, **extra):
    e = {"id": cid, "file": f"{cid}.csv", **extra}
    if params is not None:
        e.update(regime=dg.resolve_regime(params), chi=params.chi, c_half=params.c_half,
                 seed=params.seed)
        if params.chi is not None and params.chi in dg.CHI_VALUES and params.c_half in dg.C_HALF_VALUES:
            i, j = dg.knob_index(params)
            e.update(i=i, j=j, designed=dg.designed_regime(params.chi, params.c_half),
                     boundary=dg.is_boundary_cell(i, j))
    return e


def _write_grid_cloud(task):
    out, cid, params, relabel = task
    rio.write_cloud(Path(out) / f"{cid}.csv", pipelines.prepare_cloud(params, relabel))


def _write_phenotype_cloud(task):
    out, cid, seed = task
    cloud = dg.generate_phenotype(seed)
    rio.write_cloud(Path(out) / f"{cid}.csv", cloud)
    return dg.phenotype_label(cloud)


def generate_clouds(out, mode="grid", seeds=20, seed=0, regime=None, n=1, relabel=0.0, jobs=1) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    if mode == "grid":
        for n, p in enumerate(dg.grid_params(seeds, base_seed=seed)):
            i, j = dg.knob_index(p)
            cid = f"grid_i{i}_j{j}_s{n % seeds:02d}"
            entries.append((_manifest_entry(cid, p, relabel=relabel), (str(out), cid, p, relabel)))
        pipelines.pmap(_write_grid_cloud, [t for _, t in entries], jobs)
        records = [e for e, _ in entries]
    elif mode == "regime":
        if regime not in dg.REGIMES:
            raise ConfigError(f"--regime must be one of {dg.REGIMES}")
        records = []
        for s in range(seed, seed + n):
            p = dg.RegimeParams(regime=regime, seed=s)
            cid = f"{regime}_s{s:04d}"
            _write_grid_cloud((str(out), cid, p, relabel))
            records.append(_manifest_entry(cid, p, relabel=relabel))
    elif mode == "phenotype":
        tasks = [(str(out), f"phenotype_s{s:04d}", s) for s in range(seed, seed + n)]
        labels = pipelines.pmap(_write_phenotype_cloud, tasks, jobs)
        records = [{"id": cid, "file": f"{cid}.csv", "seed": s, "label": lab}
                   for (_, cid, s), lab in zip(tasks, labels)]
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    manifest = {"mode": mode, "base_seed": seed, "relabel": relabel, "clouds": records}
    rio.write_json(out / "manifest.json", manifest)
    return manifest


def cmd_generate(args) -> int:
    if not 0 <= args.relabel <= 1:
        raise ConfigError("--relabel must be in [0, 1]")
    m = generate_clouds(args.out, args.mode, args.seeds, _seed(args), args.regime, args.n,
                        args.relabel, args.jobs)
    print(f"wrote {len(m['clouds'])} clouds to {args.out}")
    return 0


# -- diagrams ----------------------------------------------------------------------------------

def _diagrams_for(path, family, pairs, species, version, empty, max_value, dump_dir=None):
    cloud = rio.read_cloud(path)
    out, complexes = {}, {}
    if family == "dowker":
        for u, v in pairs:
            fc = dowker_pair(cloud, u, v, max_value)
            complexes[f"D_{u}_{v}"] = fc
            out[f"D_{u}_{v}_pd0"], out[f"D_{u}_{v}_pd1"] = compute_diagrams(fc)
    elif family == "vr":
        for s in species:
            fc = vietoris_rips(within_distances(cloud, s), max_value)
            complexes[f"VR_{s}"] = fc
            out[f"VR_{s}_pd0"], out[f"VR_{s}_pd1"] = compute_diagrams(fc)
    else:
        landmarks = cloud.subcloud("V")
        tri = delaunay_2d(landmarks)
        for s, pts in witness_species_points(cloud, version).items():
            fc = witness_filtration(tri, landmarks, pts, species=s, empty=empty)
            complexes[f"W_{s}"] = fc
            out[f"W_{s}_pd0"], out[f"W_{s}_pd1"] = compute_diagrams(fc)
    if dump_dir is not None:
        rio.write_json(Path(dump_dir) / f"{Path(path).stem}.complex.json",
                       {k: fc.to_json() for k, fc in complexes.items()})
    return out


def cmd_diagrams(args) -> int:
    files = _inputs(args.inputs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pairs = [tuple(args.pair)] if args.pair else list(DOWKER_PAIRS)
    fn = partial(_diagrams_for, family=args.family, pairs=pairs, species=args.species,
                 version=args.version, empty=args.empty, max_value=args.max_value,
                 dump_dir=str(out) if args.dump_complex else None)
    ok, errors = _batch(fn, files, args)
    for f, diags in ok.items():
        rio.write_diagrams(out / f"{f.stem}.diagrams.json", diags)
        if args.svg:
            rio.atomic_write(out / f"{f.stem}.diagrams.svg", svg.diagram_svg(diags, f.stem))
    rio.write_json(out / "errors.json", errors)
    print(f"{len(ok)} ok, {len(errors)} failed")
    return 0


# -- features -----------------------------------------------------------------------------------

def _feature_source(path, kind, version, empty, max_value):
    cloud = rio.read_cloud(path)
    if kind == "dowker":
        return dowker_diagrams(cloud, max_value)
    if kind == "vr":
        return vr_diagrams(cloud, max_value)
    if kind == "witness":
        return witness_vector(cloud, version, empty).vector
    return simple_descriptor(cloud).vector


def compute_features(files, kind, version=1, empty="error", max_value=math.inf, specs=None,
                     jobs=1, fail_fast=False):
    """(ids, names, X, specs, errors) for a batch of cloud files."""
    ns = argparse.Namespace(jobs=jobs, fail_fast=fail_fast)
    if kind == "vr" and not math.isfinite(max_value):
        raise ConfigError("vr features need a finite --max-value")
    fn = partial(_feature_source, kind=kind, version=version, empty=empty, max_value=max_value)
    ok, errors = _batch(fn, files, ns)
    ids = [f.stem for f in ok]
    if kind in ("dowker", "vr"):
        blocks = DOWKER_BLOCKS if kind == "dowker" else VR_BLOCKS
        if specs is None:
            specs = fit_specs(list(ok.values()), blocks)
        feats = [vectorize(d, specs, blocks) for d in ok.values()]
        names = feats[0].names if feats else []
        X = np.array([f.vector for f in feats]).reshape(len(ids), len(names))
        assert X.shape[1] == sum(specs[b].size for b in blocks)
    elif kind == "witness":
        names = list(witness_entry_names(version))
        X = np.array(list(ok.values())).reshape(len(ids), len(names))
    else:
        names = list(SIMPLE_NAMES)
        X = np.array(list(ok.values())).reshape(len(ids), len(names))
    return ids, names, X, specs, errors


def cmd_features(args) -> int:
    files = _inputs(args.inputs)
    specs = None
    if args.specs_in:
        specs = {k: ImageSpec.from_json(v) for k, v in rio.read_json(args.specs_in).items()}
    ids, names, X, specs, errors = compute_features(files, args.kind, args.version, args.empty,
                                                    args.max_value, specs, args.jobs, args.fail_fast)
    rio.write_features(args.out, ids, names, X)
    stem = Path(args.out).with_suffix("")
    if specs is not None:
        rio.write_json(f"{stem}.specs.json", {k: s.to_json() for k, s in specs.items()})
    rio.write_json(f"{stem}.errors.json", errors)
    print(f"{len(ids)} rows x {len(names)} features -> {args.out}")
    return 0


# -- classify / cluster ------------------------------------------------------------------------

def _manifest_index(path) -> dict:
    return {e["id"]: e for e in rio.read_json(path)["clouds"]}


def cmd_classify(args) -> int:
    from .ml import evaluate_classifier
    index = _manifest_index(args.labels)
    results = {}
    for path in args.features:
        ids, _, X = rio.read_features(path)
        missing = [i for i in ids if "label" not in index.get(i, {})]
        if missing:
            raise ConfigError(f"{path}: no label for {missing[:3]}")
        y = np.array([int(index[i]["label"]) for i in ids])
        results[Path(path).stem] = evaluate_classifier(X, y, n_splits=args.splits,
                                                       test_fraction=args.test_fraction)
    rio.write_json(args.out, {"models": results})
    if args.svg:
        rio.atomic_write(args.svg, svg.boxplot_svg({k: v["accuracies"] for k, v in results.items()},
                                                   "test accuracy"))
    for k, v in results.items():
        print(f"{k}: median accuracy {v['median']:.4f}")
    return 0


def _grid_params_for(ids, index):
    params = []
    for i in ids:
        e = index.get(i)
        if e is None or e.get("chi") is None:
            raise ConfigError(f"manifest has no knob values for {i!r}")
        params.append(dg.RegimeParams(chi=e["chi"], c_half=e["c_half"], seed=e["seed"]))
    return params


def write_cluster_svgs(result: dict, out_dir, tag: str) -> None:
    out_dir = Path(out_dir)
    rows, cols = len(dg.C_HALF_VALUES), len(dg.CHI_VALUES)
    modal = np.full((rows, cols), np.nan)
    purity = np.full((rows, cols), np.nan)
    for c in result["cells"]:
        modal[c["j"], c["i"]] = c["modal_cluster"]
        purity[c["j"], c["i"]] = c["purity"]
    cl = [f"{v:g}" for v in dg.CHI_VALUES]
    rl = [f"{v:g}" for v in dg.C_HALF_VALUES]
    rio.atomic_write(out_dir / f"{tag}_modal.svg",
                     svg.heatmap_svg(modal, rl, cl, f"{tag}: modal cluster (x chi, y c_half)", categorical=True))
    rio.atomic_write(out_dir / f"{tag}_purity.svg",
                     svg.heatmap_svg(purity, rl, cl, f"{tag}: cluster purity"))


def cmd_cluster(args) -> int:
    ids, _, X = rio.read_features(args.features)
    params = _grid_params_for(ids, _manifest_index(args.manifest))
    seed = _seed(args)
    results = {str(k): pipelines.cluster_grid(X, params, k, seed=seed) for k in args.k}
    for r in results.values():
        r["ids"] = ids
    rio.write_json(args.out, {"clusterings": results, "seed": seed})
    if args.svg_dir:
        for k, r in results.items():
            write_cluster_svgs(r, args.svg_dir, f"{Path(args.features).stem}_k{k}")
    for k, r in results.items():
        print(f"k={k}: interior agreement {r['interior_agreement']:.3f}, "
              f"mean interior purity {r['interior_mean_purity']:.3f}")
    return 0


# -- dist / image ----------------------------------------------------------------------------------

def _pick(path, key):
    diags = rio.read_diagrams(path)
    if key not in diags:
        raise ConfigError(f"{path} has no diagram {key!r}; available: {sorted(diags)}")
    return diags[key]


def cmd_dist(args) -> int:
    a = _pick(args.a, args.key)
    b = _pick(args.b, args.key_b or args.key)
    d = distance(a, b, args.metric, args.q)
    print(rio.fmt_float(d))
    if args.out:
        rio.write_json(args.out, {"metric": args.metric, "q": args.q, "distance": d})
    return 0


def cmd_image(args) -> int:
    pd = _pick(args.diagram, args.key)
    spec = fit_image_spec([pd], tuple(args.resolution), args.sigma)
    over = {}
    if args.birth_range:
        over["birth_range"] = tuple(args.birth_range)
    if args.persistence_range:
        over["persistence_range"] = tuple(args.persistence_range)
    if args.max_persistence:
        over["max_persistence"] = args.max_persistence
    if over:
        spec = replace(spec, **over)
    img = persistence_image(pd, spec)
    lines = [",".join(rio.fmt_float(v) for v in row) for row in img.grid]
    rio.atomic_write(args.out, "\n".join(lines) + "\n")
    rio.write_json(f"{Path(args.out).with_suffix('')}.spec.json",
                   {"spec": spec.to_json(), "n_essential": img.n_essential})
    if args.svg:
        rio.atomic_write(args.svg, svg.heatmap_svg(img.grid, range(spec.resolution[0]),
                                                   range(spec.resolution[1]), f"{args.key} image"))
    return 0


# -- pipelines --------------------------------------------------------------------------------------

def cmd_pipeline(args) -> int:
    out = Path(args.out)
    seed = _seed(args)
    if args.which == "witness":
        clouds = out / "clouds"
        manifest = generate_clouds(clouds, "grid", args.seeds, seed, relabel=args.relabel, jobs=args.jobs)
        files = [clouds / e["file"] for e in manifest["clouds"]]
        index = {e["id"]: e for e in manifest["clouds"]}
        summary = {}
        for v in args.versions:
            ids, names, X, _, errors = compute_features(files, "witness", v, "saturate",
                                                        jobs=args.jobs, fail_fast=True)
            rio.write_features(out / f"witness_v{v}.csv", ids, names, X)
            params = _grid_params_for(ids, index)
            res = {str(k): pipelines.cluster_grid(X, params, k, seed=seed) for k in args.k}
            rio.write_json(out / f"cluster_v{v}.json", {"clusterings": res, "seed": seed,
                                                       "relabel": args.relabel})
            for k, r in res.items():
                write_cluster_svgs(r, out, f"witness_v{v}_k{k}")
                summary[f"v{v}_k{k}"] = {"interior_agreement": r["interior_agreement"],
                                         "interior_mean_purity": r["interior_mean_purity"]}
        rio.write_json(out / "summary.json", summary)
        for k, v in summary.items():
            print(f"{k}: agreement {v['interior_agreement']:.3f}, purity {v['interior_mean_purity']:.3f}")
    else:
        res = pipelines.phenotype_pipeline(args.n, seed, args.splits, args.jobs)
        rio.write_json(out / "classification.json", res)
        rio.atomic_write(out / "accuracy.svg", svg.boxplot_svg(
            {k: v["accuracies"] for k, v in res["models"].items()}, "test accuracy by feature set"))
        for k, v in res["models"].items():
            print(f"{k}: median accuracy {v['median']:.4f}")
    return 0


# -- parser ---------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relph", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True, jobs=True, batch=False):
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="base seed (RELPH_SEED overrides)")
        if jobs:
            sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        if batch:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--keep-going", dest="fail_fast", action="store_false", default=False,
                           help="record per-file errors and continue (default)")
            g.add_argument("--fail-fast", dest="fail_fast", action="store_true",
                           help="stop at the first per-file error")

    g = sub.add_parser("generate", help="write synthetic point clouds and a manifest")
    g.add_argument("--out", required=True)
    g.add_argument("--mode", choices=("grid", "regime", "phenotype"), default="grid")
    g.add_argument("--seeds", type=int, default=20, help="realizations per knob cell (grid mode)")
    g.add_argument("--regime", choices=dg.REGIMES)
    g.add_argument("--n", type=int, default=1, help="number of clouds (regime/phenotype mode)")
    g.add_argument("--relabel", type=float, default=0.0, help="fraction of N/M1/M2 to relabel")
    common(g)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("diagrams", help="persistence diagrams per cloud")
    d.add_argument("inputs", nargs="+")
    d.add_argument("--out", required=True)
    d.add_argument("--family", choices=("vr", "dowker", "witness"), required=True)
    d.add_argument("--pair", nargs=2, metavar=("U", "V"))
    d.add_argument("--species", nargs="+", default=["T", "M"])
    d.add_argument("--version", type=int, choices=(1, 2), default=1)
    d.add_argument("--empty", choices=("error", "saturate"), default="error")
    d.add_argument("--max-value", type=float, default=math.inf)
    d.add_argument("--dump-complex", action="store_true")
    d.add_argument("--svg", action="store_true")
    common(d, seed=False, batch=True)
    d.set_defaults(func=cmd_diagrams)

    f = sub.add_parser("features", help="feature matrix CSV")
    f.add_argument("inputs", nargs="+")
    f.add_argument("--out", required=True)
    f.add_argument("--kind", choices=("dowker", "vr", "witness", "simple"), required=True)
    f.add_argument("--version", type=int, choices=(1, 2), default=1)
    f.add_argument("--empty", choices=("error", "saturate"), default="error")
    f.add_argument("--max-value", type=float, default=math.inf)
    f.add_argument("--specs-in", help="image specs JSON to reuse instead of fitting")
    common(f, seed=False, batch=True)
    f.set_defaults(func=cmd_features)

    c = sub.add_parser("classify", help="SVM accuracy distribution over stratified splits")
    c.add_argument("features", nargs="+")
    c.add_argument("--labels", required=True, help="manifest JSON with a label per id")
    c.add_argument("--out", required=True)
    c.add_argument("--splits", type=int, default=10)
    c.add_argument("--test-fraction", type=float, default=0.2)
    c.add_argument("--svg")
    c.set_defaults(func=cmd_classify)

    k = sub.add_parser("cluster", help="k-means on grid features with per-cell purity")
    k.add_argument("features")
    k.add_argument("--manifest", required=True)
    k.add_argument("--k", type=int, nargs="+", default=[3, 4])
    k.add_argument("--out", required=True)
    k.add_argument("--svg-dir")
    common(k, jobs=False)
    k.set_defaults(func=cmd_cluster)

    t = sub.add_parser("dist", help="distance between two stored diagrams")
    t.add_argument("a")
    t.add_argument("b")
    t.add_argument("--key", required=True)
    t.add_argument("--key-b")
    t.add_argument("--metric", choices=("bottleneck", "wasserstein"), default="bottleneck")
    t.add_argument("--q", type=float, default=1.0)
    t.add_argument("--out")
    t.set_defaults(func=cmd_dist)

    im = sub.add_parser("image", help="persistence image of a stored diagram")
    im.add_argument("diagram")
    im.add_argument("--key", required=True)
    im.add_argument("--out", required=True)
    im.add_argument("--resolution", type=int, nargs=2, default=[20, 20])
    im.add_argument("--sigma", type=float, default=1.0)
    im.add_argument("--birth-range", type=float, nargs=2)
    im.add_argument("--persistence-range", type=float, nargs=2)
    im.add_argument("--max-persistence", type=float)
    im.add_argument("--svg")
    im.set_defaults(func=cmd_image)

    pl = sub.add_parser("pipeline", help="end-to-end runs")
    pl.add_argument("which", choices=("witness", "phenotype"))
    pl.add_argument("--out", required=True)
    pl.add_argument("--seeds", type=int, default=20)
    pl.add_argument("--versions", type=int, nargs="+", choices=(1, 2), default=[1, 2])
    pl.add_argument("--relabel", type=float, default=0.0)
    pl.add_argument("--k", type=int, nargs="+", default=[3, 4])
    pl.add_argument("--n", type=int, default=240, help="clouds in the phenotype corpus")
    pl.add_argument("--splits", type=int, default=10)
    common(pl)
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("relph: error: --jobs must be >= 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (RelphError, ValueError) as exc:
        print(f"relph: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"relph: fatal I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
