"""Writes the client corpus and the expected-count ledger for the shop fixture.

The ledger is computed from the scripted calls alone, never by analyzing
the written files. Rerun with `python3 generate.py` from this directory.
"""

import json
import os
import random

random.seed(20240917)

# qname -> [(param, default or None)]; defaults are Python source text.
SIGS = {
    "shop.pricing.price": [("amount", None), ("currency", "'EUR'"), ("rounding", "2")],
    "shop.pricing.discount": [("amount", None), ("rate", None), ("cap", "None")],
    "shop.pricing.tax": [("amount", None), ("region", "'EU'"), ("reduced", "False")],
    "shop.pricing.convert": [("amount", None), ("source", None), ("target", None), ("fee", "0.0")],
    "shop.pricing.round_total": [("total", None), ("digits", "2")],
    "shop.pricing.legacy_price": [("amount", None), ("mode", "'old'")],
    "shop.pricing.format_price": [("amount", None), ("symbol", "'€'"), ("spaces", "True")],
    "shop.pricing._internal_rate": [("x", None)],
    "shop.cart.Cart.__init__": [("owner", None), ("capacity", "10"), ("strict", "False")],
    "shop.cart.Cart.add": [("item", None), ("qty", "1"), ("note", "None")],
    "shop.cart.Cart.remove": [("item", None), ("qty", "1")],
    "shop.cart.Cart.total": [("with_tax", "True")],
    "shop.cart.Cart.clear": [],
    "shop.cart.Cart.export": [("fmt", "'json'"), ("indent", "None")],
    "shop.cart.Wishlist.__init__": [("owner", None)],
    "shop.cart.Wishlist.share": [("target", None)],
    "shop.cart.checkout": [("cart", None), ("method", "'card'"), ("express", "False")],
    "shop.cart.refund": [("order_id", None), ("reason", None), ("partial", "False")],
    "shop.cart.merge_carts": [("a", None), ("b", None), ("keep", "'first'")],
    "shop.cart.archive": [("cart", None), ("days", "30")],
}
CLASSES = ["shop.cart.Cart", "shop.cart.Wishlist"]

# Value pools per parameter. OMIT leaves an optional parameter out.
OMIT = object()
POOLS = {
    ("price", "amount"): ["10", "25", "99.5", "3"],
    ("price", "currency"): [OMIT, OMIT, "'USD'", "'GBP'"],
    ("price", "rounding"): [OMIT, "0", "2"],
    ("discount", "amount"): ["100", "40", "12"],
    ("discount", "rate"): ["0.1", "0.25", "0.5"],
    ("discount", "cap"): [OMIT],  # never set: planted constant None
    ("tax", "amount"): ["100", "7", "19.99"],
    ("tax", "region"): [OMIT, "'US'", "'EU'", "'UK'"],
    ("tax", "reduced"): ["False"],  # always the default: planted constant
    ("round_total", "total"): ["1.234", "5.678", "9"],
    ("round_total", "digits"): [OMIT],  # planted constant 2
    ("format_price", "amount"): ["1", "2", "3"],
    ("format_price", "symbol"): [OMIT, "'$'", "'£'"],
    ("format_price", "spaces"): ["False"],  # planted constant
    ("Cart", "owner"): ["'ann'", "'bob'", "'cy'"],
    ("Cart", "capacity"): [OMIT, "5", "20"],
    ("Cart", "strict"): ["True"],  # planted constant
    ("add", "item"): ["'apple'", "'pear'", "'fig'"],
    ("add", "qty"): [OMIT, "2", "3"],
    ("add", "note"): [OMIT, "'gift'"],
    ("remove", "item"): ["'apple'", "'pear'"],
    ("remove", "qty"): [OMIT, "2"],
    ("total", "with_tax"): [OMIT, "False"],
    ("checkout", "method"): [OMIT, "'cash'", "'invoice'"],
    ("checkout", "express"): ["True"],  # planted constant
    ("refund", "order_id"): ["1", "2", "3", "4"],
    ("refund", "reason"): ["'damaged'", "'late'"],
    ("refund", "partial"): [OMIT, "True"],
    ("merge_carts", "keep"): [OMIT, "'second'", "'first'"],
}

PLANTED_REMOVE = [
    "shop.pricing.legacy_price",
    "shop.cart.Cart.export",
    "shop.cart.Wishlist",
    "shop.cart.Wishlist.share",
    "shop.cart.archive",
]
PLANTED_CONSTANT = {
    "shop.pricing.discount.cap": "None",
    "shop.pricing.tax.reduced": "False",
    "shop.pricing.round_total.digits": "2",
    "shop.pricing.format_price.spaces": "False",
    "shop.cart.Cart.__init__.strict": "True",
    "shop.cart.checkout.express": "True",
}


class Ledger:
    def __init__(self):
        self.classes = {c: 0 for c in CLASSES}
        self.functions = {f: 0 for f in SIGS}
        self.params = {}
        self.values = {}
        self.non_literal = {}
        for f, ps in SIGS.items():
            for p, _ in ps:
                q = f"{f}.{p}"
                self.params[q] = 0
                self.values[q] = {}
                self.non_literal[q] = 0
        self.calls = 0

    def call(self, qname, explicit, cls=None):
        """explicit: {param: value text, or None for a non-literal}"""
        self.calls += 1
        if cls:
            self.classes[cls] += 1
        self.functions[qname] += 1
        for p, default in SIGS[qname]:
            q = f"{qname}.{p}"
            if p in explicit:
                self.params[q] += 1
                v = explicit[p]
                if v is None:
                    self.non_literal[q] += 1
                else:
                    self.values[q][v] = self.values[q].get(v, 0) + 1
            else:
                assert default is not None, f"{q} is required"
                self.values[q][default] = self.values[q].get(default, 0) + 1


def pick(key):
    return random.choice(POOLS[key])


def args_for(func, params, positional_required=True):
    """Returns (source argument list, explicit map)."""
    parts = []
    explicit = {}
    keyword_only_now = False
    for p, default in params:
        v = pick((func, p))
        if v is OMIT:
            keyword_only_now = True
            continue
        explicit[p] = v
        if default is None and positional_required and not keyword_only_now:
            parts.append(v)
        else:
            parts.append(f"{p}={v}")
            keyword_only_now = True
    return ", ".join(parts), explicit


def client(i, ledger):
    lines = []
    style = i % 3
    if style == 0:
        lines.append("from shop.pricing import price, discount, tax, round_total, format_price")
        pre = ""
    elif style == 1:
        lines.append("import shop.pricing as sp")
        pre = "sp."
    else:
        lines.append("import shop.pricing")
        pre = "shop.pricing."
    lines.append("from shop.cart import Cart, checkout, refund, merge_carts")
    lines.append("")
    body = []
    for _ in range(random.randint(2, 4)):
        name = random.choice(["price", "discount", "tax", "round_total", "format_price"])
        src, explicit = args_for(name, SIGS[f"shop.pricing.{name}"])
        body.append(f"{pre}{name}({src})")
        ledger.call(f"shop.pricing.{name}", explicit)
    if i % 2 == 0:
        src, explicit = args_for("Cart", SIGS["shop.cart.Cart.__init__"])
        body.append(f"c = Cart({src})")
        ledger.call("shop.cart.Cart.__init__", explicit, cls="shop.cart.Cart")
        for _ in range(random.randint(1, 3)):
            m = random.choice(["add", "remove", "total", "clear"])
            if m == "clear":
                body.append("c.clear()")
                ledger.call("shop.cart.Cart.clear", {}, cls="shop.cart.Cart")
                continue
            src, explicit = args_for(m, SIGS[f"shop.cart.Cart.{m}"])
            body.append(f"c.{m}({src})")
            ledger.call(f"shop.cart.Cart.{m}", explicit, cls="shop.cart.Cart")
        src, explicit = args_for("checkout", SIGS["shop.cart.checkout"][1:])
        body.append(f"checkout(c, {src})" if src else "checkout(c)")
        explicit["cart"] = None
        ledger.call("shop.cart.checkout", explicit)
    if i % 5 == 1:
        src, explicit = args_for("refund", SIGS["shop.cart.refund"])
        body.append(f"refund({src})")
        ledger.call("shop.cart.refund", explicit)
    if i % 7 == 3:
        src, explicit = args_for("merge_carts", SIGS["shop.cart.merge_carts"][2:])
        body.append("a = Cart('x', strict=True)")
        ledger.call("shop.cart.Cart.__init__", {"owner": "'x'", "strict": "True"}, cls="shop.cart.Cart")
        body.append("b = Cart('y', strict=True)")
        ledger.call("shop.cart.Cart.__init__", {"owner": "'y'", "strict": "True"}, cls="shop.cart.Cart")
        body.append(f"merge_carts(a, b, {src})" if src else "merge_carts(a, b)")
        explicit.update({"a": None, "b": None})
        ledger.call("shop.cart.merge_carts", explicit)
    if i == 17:
        # The only call of convert; every argument is a local variable.
        lines.insert(0, "from shop.pricing import convert")
        body += ["amount = 3", "src = 'EUR'", "dst = 'USD'", "fee = 0.5", "convert(amount, src, dst, fee=fee)"]
        ledger.call("shop.pricing.convert", {"amount": None, "source": None, "target": None, "fee": None})
    if i % 10 == 9:
        # Not resolvable statically.
        body.append(f"getattr({pre.rstrip('.') or 'shop'}, 'price')(1)" if pre else "getattr(price, '__call__')(1)")
    if i % 4 == 2:
        lines.append("")
        lines.append("def main():")
        lines.extend("    " + b for b in body)
        lines.append("")
        lines.append("main()")
    else:
        lines.extend(body)
    return "\n".join(lines) + "\n"


def is_public(qname):
    return not any(s.startswith("_") and not s.endswith("__") for s in qname.split("."))


def classify(usage, usefulness=None):
    if usage == 0:
        return "unused"
    if usefulness is not None and usefulness == 0:
        return "useless"
    return "useful"


def main():
    ledger = Ledger()
    os.makedirs("clients", exist_ok=True)
    for i in range(50):
        with open(f"clients/client_{i:02}.py", "w", encoding="utf-8") as f:
            f.write(client(i, ledger))

    elements = {}
    for c, n in ledger.classes.items():
        elements[c] = {"usage_count": n, "classification": classify(n)}
    for f, n in ledger.functions.items():
        elements[f] = {"usage_count": n, "classification": classify(n)}
    planted_constant = {}
    for q, n in ledger.params.items():
        counts = sorted(ledger.values[q].values(), reverse=True)
        total = sum(counts) + ledger.non_literal[q]
        top = max(counts + ([1] if ledger.non_literal[q] else []), default=0)
        usefulness = total - top
        elements[q] = {
            "usage_count": n,
            "usefulness": usefulness,
            "classification": classify(n, usefulness),
            "values": ledger.values[q],
            "non_literal": ledger.non_literal[q],
        }
        public = is_public(q)
        literal_top = counts and counts[0] >= (1 if ledger.non_literal[q] else 0) and counts[0] == top
        if public and total and usefulness == 0 and literal_top:
            top_value = [v for v, k in ledger.values[q].items() if k == top][0]
            planted_constant[q] = top_value
    planted_remove = [q for q, e in elements.items() if e["usage_count"] == 0 and is_public(q)
                      and "usefulness" not in e and not q.endswith(".__init__")]
    assert sorted(planted_remove) == sorted(PLANTED_REMOVE), planted_remove
    assert planted_constant == PLANTED_CONSTANT, planted_constant

    ledger_doc = {
        "library": "shop",
        "threshold": 1,
        "files": 50,
        "calls_resolved": ledger.calls,
        "elements": elements,
        "planted": {
            "remove": sorted(PLANTED_REMOVE),
            "replace_with_constant": dict(sorted(PLANTED_CONSTANT.items())),
        },
    }
    with open("ledger.json", "w", encoding="utf-8") as f:
        json.dump(ledger_doc, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()
