"""Behaviour oracle for generated adapters.

usage: oracle.py LIBRARY_PARENT ADAPTER_DIR ANNOTATIONS_JSON

The original fixture library records every call it receives. For each
wrapper without bounds or enum annotations this script calls the adapter
with every combination of small literal arguments, derives the matching
direct call from the annotations alone, and compares the call records.
Prints a JSON summary; exits 1 on any mismatch.
"""

import ast
import importlib
import inspect
import itertools
import json
import pkgutil
import sys

OMIT = object()
DOMAIN = [0, "a"]


def load_annotations(path):
    doc = json.load(open(path, encoding="utf-8"))
    by_target = {}
    for a in doc["annotations"]:
        if a.get("review") == "wrong":
            continue
        by_target.setdefault(a["target"], []).append(a)
    return doc["library"]["name"], by_target


def find(anns, target, kind):
    return next((a for a in anns.get(target, []) if a["kind"] == kind), None)


def original_functions(lib):
    """(qname, owner class qname or None, callable) for every public function."""
    root = importlib.import_module(lib)
    mods = [root] + [importlib.import_module(m.name) for m in pkgutil.walk_packages(root.__path__, lib + ".")]
    for mod in mods:
        if any(part.startswith("_") for part in mod.__name__.split(".")):
            continue
        for name, obj in vars(mod).items():
            if name.startswith("_") or getattr(obj, "__module__", None) != mod.__name__:
                continue
            q = f"{mod.__name__}.{name}"
            if inspect.isfunction(obj):
                yield q, None, obj
            elif inspect.isclass(obj):
                for mname, m in vars(obj).items():
                    if inspect.isfunction(m) and (mname == "__init__" or not mname.startswith("_")):
                        yield f"{q}.{mname}", q, m


def adapted_location(lib, anns, qname):
    """Adapter module and name of an original class or function."""
    module, name = qname.rsplit(".", 1)
    moved = find(anns, qname, "Move")
    if moved:
        module = moved["new_module"]
    renamed = find(anns, qname, "Rename")
    if renamed:
        name = renamed["new_name"]
    return lib + "_adapted" + module[len(lib):], name


class Plan:
    """Adapter parameters and how each maps back to original arguments."""

    def __init__(self, anns, qname, func):
        params = [p for p in inspect.signature(func).parameters.values() if p.name != "self"]
        self.constants = {}
        self.adapter = []  # (adapter name, default or OMIT, original names or single name)
        group = find(anns, qname, "Group")
        grouped = set(group["parameter_names"]) if group else set()
        for p in params:
            pq = f"{qname}.{p.name}"
            const = find(anns, pq, "ReplaceWithConstant")
            if const:
                self.constants[p.name] = ast.literal_eval(const["value"])
                continue
            if p.name in grouped:
                continue
            default = OMIT if p.default is inspect.Parameter.empty else p.default
            opt = find(anns, pq, "MakeOptional")
            if opt:
                default = ast.literal_eval(opt["default"])
            if find(anns, pq, "MakeRequired"):
                default = OMIT
            renamed = find(anns, pq, "Rename")
            self.adapter.append((renamed["new_name"] if renamed else p.name, default, p.name))
        self.group = group

    def combinations(self, module):
        domains = []
        for name, default, _ in self.adapter:
            domains.append([(name, v) for v in DOMAIN] + ([(name, OMIT)] if default is not OMIT else []))
        if self.group:
            cls = getattr(module, self.group["group_class_name"])
            fields = self.group["parameter_names"]
            values = [dict(zip(fields, vs)) for vs in itertools.product(DOMAIN, repeat=len(fields))]
            domains.append([(self.group["new_parameter_name"], ("group", cls, v)) for v in values])
        for combo in itertools.product(*domains):
            adapter_kwargs = {}
            original_kwargs = dict(self.constants)
            for name, v in combo:
                if isinstance(v, tuple) and v and v[0] == "group":
                    _, cls, fields = v
                    adapter_kwargs[name] = cls(**fields)
                    original_kwargs.update(fields)
                    continue
                orig, default = next((o, d) for n, d, o in self.adapter if n == name)
                if v is OMIT:
                    original_kwargs[orig] = default
                else:
                    adapter_kwargs[name] = v
                    original_kwargs[orig] = v
            yield adapter_kwargs, original_kwargs


def main():
    lib_parent, adapter_dir, ann_path = sys.argv[1:4]
    sys.path[:0] = [adapter_dir, lib_parent]
    lib, anns = load_annotations(ann_path)
    rec = importlib.import_module(f"{lib}._rec")
    summary = {"wrappers": 0, "combinations": 0, "skipped": [], "mismatches": []}
    for qname, owner, func in original_functions(lib):
        owner_or_self = owner or qname
        if find(anns, owner_or_self, "Remove") or find(anns, qname, "Remove"):
            continue
        param_kinds = {a["kind"] for p in inspect.signature(func).parameters for a in anns.get(f"{qname}.{p}", [])}
        if param_kinds & {"AddBoundsCheck", "ReplaceWithEnum"}:
            summary["skipped"].append(qname)
            continue
        plan = Plan(anns, qname, func)
        if owner:
            mod_name, cls_name = adapted_location(lib, anns, owner)
            module = importlib.import_module(mod_name)
            adapter_cls = getattr(module, cls_name)
            original_cls = getattr(importlib.import_module(owner.rsplit(".", 1)[0]), owner.rsplit(".", 1)[1])
            init_plan = Plan(anns, f"{owner}.__init__", original_cls.__init__)
            mname = qname.rsplit(".", 1)[1]
            renamed = find(anns, qname, "Rename")
            adapter_mname = renamed["new_name"] if renamed else mname
            init_adapter, init_original = next(init_plan.combinations(module))
            if mname == "__init__":
                def call_adapter(kw):
                    adapter_cls(**kw)

                def call_original(kw):
                    original_cls(**kw)
            else:
                def call_adapter(kw):
                    obj = adapter_cls(**init_adapter)
                    rec.CALLS.clear()
                    return getattr(obj, adapter_mname)(**kw)

                def call_original(kw):
                    obj = original_cls(**init_original)
                    rec.CALLS.clear()
                    return getattr(obj, mname)(**kw)
        else:
            mod_name, fname = adapted_location(lib, anns, qname)
            module = importlib.import_module(mod_name)
            adapter_fn = getattr(module, fname)
            original_fn = func

            def call_adapter(kw):
                return adapter_fn(**kw)

            def call_original(kw):
                return original_fn(**kw)

        summary["wrappers"] += 1
        for adapter_kwargs, original_kwargs in plan.combinations(module):
            summary["combinations"] += 1
            rec.CALLS.clear()
            got_ret = call_adapter(adapter_kwargs)
            got = list(rec.CALLS)
            rec.CALLS.clear()
            want_ret = call_original(original_kwargs)
            want = list(rec.CALLS)
            if got != want or got_ret != want_ret:
                summary["mismatches"].append(
                    {"wrapper": qname, "args": repr(adapter_kwargs), "adapter": repr(got), "direct": repr(want)}
                )
    print(json.dumps(summary, indent=2, sort_keys=True))
    sys.exit(1 if summary["mismatches"] or not summary["wrappers"] else 0)


if __name__ == "__main__":
    main()
