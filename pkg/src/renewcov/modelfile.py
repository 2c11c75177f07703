"""Model files: TOML schema -> :class:`ModelSpec`.

Schema::

    lattice = false                  # optional; declares a lattice clock

    [[components]]                   # one block per independent primitive
    name = "u1"
    kind = "exponential"             # exponential | gamma | uniform | deterministic
    mean = 1.0                       # exponential: mean
                                     # gamma: shape, scale
                                     # uniform: lo, hi
                                     # deterministic: value

    [time]                           # cycle length
    constant = 0.0                   # optional, default 0
    terms = [ { component = "u1", coef = 1.0 } ]

    [[rewards]]                      # one block per reward coordinate
    name = "x"
    constant = 0.0
    terms = [ { component = "u1", coef = 1.0 } ]

    [delay]                          # optional; default mode = "ordinary"
    mode = "ordinary"                # ordinary | same-as-cycle | custom
    # mode = "custom" nests its own components/time/rewards tables.

Parsing performs the reference and shape checks (with positional context in
messages) and raises :class:`ModelParseError`; semantic validation such as
sign constraints happens in :class:`ModelSpec` itself.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .distributions import Primitive
from .errors import ModelError, ModelParseError
from .model import ORDINARY, SAME_AS_CYCLE, AffineForm, DelayCycle, ModelSpec

_KIND_PARAMS = {
    "exponential": ("mean",),
    "gamma": ("shape", "scale"),
    "uniform": ("lo", "hi"),
    "deterministic": ("value",),
}


def parse_model_file(path) -> ModelSpec:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_model_bytes(data, source=str(path))


def parse_model_text(text: str, source: str = "<string>") -> ModelSpec:
    return parse_model_bytes(text.encode(), source=source)


def parse_model_bytes(data: bytes, source: str) -> ModelSpec:
    try:
        doc = tomllib.loads(data.decode())
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ModelParseError(f"{source}: {exc}") from exc
    try:
        return _build_spec(doc, source)
    except ModelParseError:
        raise
    except ModelError as exc:
        raise ModelParseError(f"{source}: {exc}") from exc


def _build_spec(doc: dict, source: str) -> ModelSpec:
    known = {"components", "time", "rewards", "delay", "lattice"}
    for key in doc:
        if key not in known:
            raise ModelParseError(f"{source}: unknown top-level key {key!r}")
    components = _parse_components(doc, source, where="components")
    time_form = _parse_form(doc.get("time"), f"{source}: time", components)
    rewards, names = _parse_rewards(doc, source, components)
    delay = _parse_delay(doc.get("delay"), source, len(rewards))
    lattice = doc.get("lattice", False)
    if not isinstance(lattice, bool):
        raise ModelParseError(f"{source}: lattice must be a boolean")
    return ModelSpec(
        components=components,
        time=time_form,
        rewards=rewards,
        reward_names=names,
        delay=delay,
        lattice=lattice,
    )


def _parse_components(doc, source, where) -> dict[str, Primitive]:
    entries = doc.get("components", [])
    if not isinstance(entries, list):
        raise ModelParseError(f"{source}: {where} must be an array of tables")
    out: dict[str, Primitive] = {}
    for k, entry in enumerate(entries):
        ctx = f"{source}: {where}[{k}]"
        if not isinstance(entry, dict):
            raise ModelParseError(f"{ctx}: expected a table")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ModelParseError(f"{ctx}: missing component name")
        if name in out:
            raise ModelParseError(f"{ctx}: duplicate component name {name!r}")
        kind = entry.get("kind")
        if kind not in _KIND_PARAMS:
            raise ModelParseError(
                f"{ctx}: unknown kind {kind!r}; expected one of {sorted(_KIND_PARAMS)}"
            )
        params = []
        for pname in _KIND_PARAMS[kind]:
            if pname not in entry:
                raise ModelParseError(f"{ctx}: {kind} requires parameter {pname!r}")
            value = entry[pname]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ModelParseError(f"{ctx}: parameter {pname!r} must be a number")
            params.append(float(value))
        extra = set(entry) - {"name", "kind", *_KIND_PARAMS[kind]}
        if extra:
            raise ModelParseError(f"{ctx}: unexpected keys {sorted(extra)}")
        try:
            out[name] = Primitive(kind, tuple(params))
        except ModelError as exc:
            raise ModelParseError(f"{ctx}: {exc}") from exc
    return out


def _parse_form(table, ctx, components) -> AffineForm:
    if table is None:
        raise ModelParseError(f"{ctx}: missing table")
    if not isinstance(table, dict):
        raise ModelParseError(f"{ctx}: expected a table")
    constant = table.get("constant", 0.0)
    if not isinstance(constant, (int, float)) or isinstance(constant, bool):
        raise ModelParseError(f"{ctx}: constant must be a number")
    terms_in = table.get("terms", [])
    if not isinstance(terms_in, list):
        raise ModelParseError(f"{ctx}: terms must be an array")
    terms = []
    for k, term in enumerate(terms_in):
        tctx = f"{ctx}.terms[{k}]"
        if not isinstance(term, dict):
            raise ModelParseError(f"{tctx}: expected {{component, coef}}")
        cname = term.get("component")
        if not isinstance(cname, str):
            raise ModelParseError(f"{tctx}: missing component reference")
        if cname not in components:
            raise ModelParseError(f"{tctx}: unknown component {cname!r}")
        coef = term.get("coef", 1.0)
        if not isinstance(coef, (int, float)) or isinstance(coef, bool):
            raise ModelParseError(f"{tctx}: coef must be a number")
        if set(term) - {"component", "coef"}:
            raise ModelParseError(f"{tctx}: unexpected keys")
        terms.append((cname, float(coef)))
    if set(table) - {"constant", "terms", "name"}:
        raise ModelParseError(f"{ctx}: unexpected keys")
    return AffineForm(float(constant), tuple(terms))


def _parse_rewards(doc, source, components):
    entries = doc.get("rewards", [])
    if not isinstance(entries, list) or not entries:
        raise ModelParseError(f"{source}: at least one [[rewards]] block is required")
    forms, names = [], []
    for k, entry in enumerate(entries):
        ctx = f"{source}: rewards[{k}]"
        if not isinstance(entry, dict):
            raise ModelParseError(f"{ctx}: expected a table")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ModelParseError(f"{ctx}: missing reward name")
        if name in names:
            raise ModelParseError(f"{ctx}: duplicate reward name {name!r}")
        forms.append(_parse_form(entry, ctx, components))
        names.append(name)
    return tuple(forms), tuple(names)


def _parse_delay(table, source, n_rewards):
    if table is None:
        return ORDINARY
    ctx = f"{source}: delay"
    if not isinstance(table, dict):
        raise ModelParseError(f"{ctx}: expected a table")
    mode = table.get("mode", ORDINARY)
    if mode in (ORDINARY, SAME_AS_CYCLE):
        if set(table) - {"mode"}:
            raise ModelParseError(f"{ctx}: unexpected keys for mode {mode!r}")
        return mode
    if mode != "custom":
        raise ModelParseError(
            f"{ctx}: mode must be 'ordinary', 'same-as-cycle' or 'custom', got {mode!r}"
        )
    components = _parse_components(table, ctx, where="components")
    time_form = _parse_form(table.get("time"), f"{ctx}.time", components)
    entries = table.get("rewards", [])
    if not isinstance(entries, list) or len(entries) != n_rewards:
        raise ModelParseError(
            f"{ctx}: custom delay needs exactly {n_rewards} reward forms"
        )
    forms = tuple(
        _parse_form(entry, f"{ctx}.rewards[{k}]", components)
        for k, entry in enumerate(entries)
    )
    try:
        return DelayCycle(components=components, time=time_form, rewards=forms)
    except ModelError as exc:
        raise ModelParseError(f"{ctx}: {exc}") from exc
