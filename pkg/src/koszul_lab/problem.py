"""Problem files: JSON descriptions of a field, the linear data, named modules and a window."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field

from .bigraded import ComplexError, Window
from .dgmod import FiniteModule, ModuleError, SemiFreeModule, ShiftedModule, validate
from .fields import FieldError, FieldSpec, field_from_json
from .geometry import (BaseChangeSetup, BundleMorphismSetup, SetupError, SubbundleSetup,
                       base_change_functors, build_X_lkd, phi_functors)
from .koszul import KoszulContext, koszul_K1, koszul_K2
from .linalg import Matrix
from .symdg import GeneratorComplex, GeneratorError

KINDS = ("complex", "setup", "morphism", "base_change")
BIDEGREE = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")


class ProblemError(ValueError):
    def __init__(self, msg, path="$"):
        super().__init__(f"{path}: {msg}")
        self.path = path
        self.msg = msg


def parse_window(obj, path="$.window") -> Window:
    try:
        if isinstance(obj, str):
            return Window.parse(obj)
        return Window(int(obj["j_min"]), int(obj["j_max"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError(f"bad window ({exc})", path) from None


def parse_bidegree(key, path):
    m = BIDEGREE.match(key.strip()) if isinstance(key, str) else None
    if not m:
        raise ProblemError(f"bidegree key {key!r} is not of the form '(i,j)'", path)
    return int(m.group(1)), int(m.group(2))


def parse_matrix(fld, rows, shape, path) -> Matrix:
    nrows, ncols = shape
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ProblemError("matrix must be a list of rows", path)
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        got = (len(rows), len(rows[0]) if rows else 0)
        raise ProblemError(f"matrix has shape {got}, expected {shape}", path)
    try:
        if nrows == 0:
            return Matrix(fld, 0, ncols)
        return Matrix.from_rows(fld, rows, ncols=ncols)
    except FieldError as exc:
        raise ProblemError(str(exc), path) from None


def format_matrix(m: Matrix):
    fmt = m.field.format
    return [[fmt(x) for x in r] for r in m.to_rows()]


def _bidegree_key(b):
    return f"({b[0]},{b[1]})"


# ---- modules ---------------------------------------------------------------------------


def module_from_json(ctx: KoszulContext, obj, path):
    """A named module: explicit blocks, or a free/trivial module, optionally shifted."""
    if not isinstance(obj, dict):
        raise ProblemError("module must be an object", path)
    alg_name = obj.get("algebra", "T")
    if alg_name not in ("T", "S", "R"):
        raise ProblemError(f"unknown algebra {alg_name!r}", f"{path}.algebra")
    A = getattr(ctx, alg_name)
    kind = obj.get("kind", "explicit")
    fld = ctx.field
    if kind == "free":
        gens = obj.get("gens", [[0, 0]])
        M = SemiFreeModule(A, [tuple(int(x) for x in g) for g in gens])
    elif kind == "trivial":
        dims = {parse_bidegree(k, f"{path}.dims"): int(v) for k, v in obj.get("dims", {"(0,0)": 1}).items()}
        M = FiniteModule(A, dims)
    elif kind == "explicit":
        raw_dims = obj.get("dims")
        if not isinstance(raw_dims, dict):
            raise ProblemError("explicit module needs a 'dims' object", f"{path}.dims")
        dims = {}
        for k, v in raw_dims.items():
            dims[parse_bidegree(k, f"{path}.dims")] = int(v)
        dim = lambda i, j: dims.get((i, j), 0)  # noqa: E731
        diff = {}
        for k, rows in obj.get("diff", {}).items():
            i, j = parse_bidegree(k, f"{path}.diff")
            diff[(i, j)] = parse_matrix(fld, rows, (dim(i + 1, j), dim(i, j)), f"{path}.diff[{k!r}]")
        acts = {}
        for label, blocks in obj.get("actions", {}).items():
            if label not in A.labels:
                raise ProblemError(f"unknown generator {label!r} (have {sorted(A.labels)})",
                                   f"{path}.actions")
            gk = A.labels[label]
            a, t = A.generators[gk].bidegree
            for k, rows in blocks.items():
                i, j = parse_bidegree(k, f"{path}.actions.{label}")
                acts.setdefault(gk, {})[(i, j)] = parse_matrix(
                    fld, rows, (dim(i + a, j + t), dim(i, j)), f"{path}.actions.{label}[{k!r}]")
        try:
            M = FiniteModule(A, dims, diff, acts)
        except ModuleError as exc:
            raise ProblemError(str(exc), path) from None
    else:
        raise ProblemError(f"unknown module kind {kind!r}", f"{path}.kind")
    shift = obj.get("shift")
    if shift:
        M = ShiftedModule(M, int(shift[0]), int(shift[1]))
    if isinstance(M, FiniteModule):
        report = validate(M, Window(M.j_lo, M.j_hi))
        if report:
            first = report[0]
            raise ProblemError(f"{first['invariant']} violated at bidegree {tuple(first['bidegree'])}",
                               path)
    return M


def module_to_json(M, w: Window, name_of_algebra=None):
    snap = FiniteModule.snapshot(M, w)
    A = snap.algebra
    out = {
        "algebra": name_of_algebra or A.name,
        "dims": {_bidegree_key(b): n for b, n in sorted(snap.dims.items())},
        "diff": {_bidegree_key(b): format_matrix(m) for b, m in sorted(snap._diff_blocks.items())
                 if not m.is_zero()},
        "actions": {},
    }
    for k, blocks in sorted(snap._act_blocks.items()):
        out["actions"][A.generators[k].label] = {_bidegree_key(b): format_matrix(m)
                                                 for b, m in sorted(blocks.items())}
    return out


# ---- problem files --------------------------------------------------------------------------


@dataclass
class ProblemFile:
    field: FieldSpec
    kind: str
    data: object  # GeneratorComplex, SubbundleSetup, BundleMorphismSetup or (BaseChangeSetup, complex)
    window: Window
    modules_json: dict = dc_field(default_factory=dict)
    _ctx: object = dc_field(default=None, repr=False, compare=False)
    _modules: dict = dc_field(default=None, repr=False, compare=False)

    def __eq__(self, other):
        return isinstance(other, ProblemFile) and self.to_json() == other.to_json()

    # -- derived objects

    def context(self) -> KoszulContext:
        if self._ctx is None:
            if self.kind == "complex":
                self._ctx = KoszulContext(self.data)
            elif self.kind == "setup":
                self._ctx = KoszulContext(build_X_lkd(self.data))
            elif self.kind == "morphism":
                self._ctx = self.morphism_data().ctx
            else:
                self._ctx = self.base_change_data().ctx_Y
        return self._ctx

    def morphism_data(self):
        if getattr(self, "_mdata", None) is None:
            self._mdata = phi_functors(self.data)
        return self._mdata

    def base_change_data(self):
        if getattr(self, "_bdata", None) is None:
            bc, X = self.data
            self._bdata = base_change_functors(bc, X)
        return self._bdata

    def builtin_modules(self):
        ctx = self.context()
        out = {"T": ctx.free("T"), "S": ctx.free("S"), "R": ctx.free("R"),
               "k_T": ctx.trivial("T"), "k_S": ctx.trivial("S"), "k_R": ctx.trivial("R"),
               "T_dual": ctx.T_dual()}
        out["K1"] = koszul_K1(ctx)[0]
        out["K2"] = koszul_K2(ctx)[0]
        return out

    def modules(self):
        if self._modules is None:
            mods = self.builtin_modules()
            ctx = self.context()
            for name, obj in self.modules_json.items():
                mods[name] = module_from_json(ctx, obj, f"$.modules.{name}")
            self._modules = mods
        return self._modules

    def module(self, name):
        mods = self.modules()
        if name not in mods:
            raise ProblemError(f"unknown module {name!r}; available: {', '.join(sorted(mods))}",
                               "$.modules")
        return mods[name]

    # -- serialization

    def to_json(self):
        out = {"field": self.field.to_json(), "window": self.window.to_json()}
        if self.kind == "complex":
            out["complex"] = self.data.to_json()
        elif self.kind == "setup":
            out["setup"] = self.data.to_json()
        elif self.kind == "morphism":
            b = self.data
            out["morphism"] = {"source": b.source.to_json(), "target": b.target.to_json(),
                               "phi": format_matrix(b.phi)}
        else:
            bc, X = self.data
            out["complex"] = X.to_json()
            out["base_change"] = {"extension": bc.ext.to_json(),
                                  "lambda": [bc.base.format(x) for x in bc.lam]}
        if self.modules_json:
            out["modules"] = self.modules_json
        return out


def _complex(fld, obj, path):
    if not isinstance(obj, dict) or "ranks" not in obj:
        raise ProblemError("complex needs 'ranks'", path)
    try:
        ranks = {int(i): int(r) for i, r in obj["ranks"].items()}
    except (AttributeError, ValueError):
        raise ProblemError("ranks must map degrees to integers", f"{path}.ranks") from None
    if any(i > 0 for i in ranks):
        raise ProblemError("generator complex must live in degrees <= 0", f"{path}.ranks")
    diffs = {}
    for i, rows in (obj.get("diffs") or {}).items():
        i = int(i)
        diffs[i] = parse_matrix(fld, rows, (ranks.get(i + 1, 0), ranks.get(i, 0)),
                                f"{path}.diffs[{str(i)!r}]")
    try:
        return GeneratorComplex(fld, ranks, diffs)
    except GeneratorError as exc:
        raise ProblemError(str(exc), path) from None


def _setup(fld, obj, path):
    try:
        n = int(obj["dim_E"])
        f1 = obj.get("F1") or []
        f2 = obj.get("F2") or []
        m1 = parse_matrix(fld, f1, (n, len(f1[0]) if f1 else 0), f"{path}.F1") if f1 else Matrix(fld, n, 0)
        m2 = parse_matrix(fld, f2, (n, len(f2[0]) if f2 else 0), f"{path}.F2") if f2 else Matrix(fld, n, 0)
        return SubbundleSetup(fld, n, m1, m2)
    except (KeyError, TypeError) as exc:
        raise ProblemError(f"bad setup ({exc})", path) from None
    except SetupError as exc:
        raise ProblemError(str(exc), path) from None


def parse_obj(obj) -> ProblemFile:
    if not isinstance(obj, dict):
        raise ProblemError("problem must be a JSON object")
    if "field" not in obj:
        raise ProblemError("missing 'field'")
    try:
        fld = field_from_json(obj["field"])
    except (FieldError, KeyError, TypeError, ValueError) as exc:
        raise ProblemError(str(exc), "$.field") from None
    if "window" not in obj:
        raise ProblemError("missing 'window' (windows are mandatory)")
    w = parse_window(obj["window"])
    if "base_change" in obj:
        kind = "base_change"
        bobj = obj["base_change"]
        try:
            ext = field_from_json(bobj["extension"])
            bc = BaseChangeSetup(fld, ext, bobj.get("lambda"))
        except (FieldError, SetupError, KeyError, TypeError) as exc:
            raise ProblemError(str(exc), "$.base_change") from None
        data = (bc, _complex(fld, obj.get("complex"), "$.complex"))
    elif "morphism" in obj:
        kind = "morphism"
        mobj = obj["morphism"]
        src = _setup(fld, mobj.get("source", {}), "$.morphism.source")
        tgt = _setup(fld, mobj.get("target", {}), "$.morphism.target")
        phi = parse_matrix(fld, mobj.get("phi"), (tgt.dim_E, src.dim_E), "$.morphism.phi")
        try:
            data = BundleMorphismSetup(src, tgt, phi)
        except SetupError as exc:
            raise ProblemError(str(exc), "$.morphism") from None
    elif "setup" in obj:
        kind, data = "setup", _setup(fld, obj["setup"], "$.setup")
    elif "complex" in obj:
        kind, data = "complex", _complex(fld, obj["complex"], "$.complex")
    else:
        raise ProblemError(f"problem needs one of {', '.join(KINDS)}")
    mods = obj.get("modules") or {}
    if not isinstance(mods, dict):
        raise ProblemError("modules must be an object of named modules", "$.modules")
    p = ProblemFile(fld, kind, data, w, dict(mods))
    try:
        p.modules()
    except (ComplexError, ModuleError) as exc:
        raise ProblemError(str(exc), "$.modules") from None
    return p


def parse(path) -> ProblemFile:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_obj(obj)


def emit(p: ProblemFile) -> str:
    return json.dumps(p.to_json(), sort_keys=True, indent=2)
