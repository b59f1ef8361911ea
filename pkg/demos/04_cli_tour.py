"""Drive the command-line front end in-process and show each output format."""

# %%
import io
import json

from embedded_nash.cli import main

cusp = json.dumps({"nu": 2, "char_exponents": [3]})


def cli(*argv, doc=cusp):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), doc, out, err)
    print(f"$ embedded-nash {' '.join(argv)}   [exit {code}]")
    print(out.getvalue() + err.getvalue())


# %%
cli("components", "--m", "12", "--format", "table")
cli("lct", "--m", "6")
cli("fim", "--m", "12", "--vertex", "L1:6/1")
cli("fim", "--m", "12", "--vertex", "L1:6/1", "--literal-kappa", "--format", "table")

# %% [markdown]
# A resolved graph can be fed back as a generic graph document.

# %%
resolved = io.StringIO()
main(["resolve"], cusp, resolved, io.StringIO())
cli("valuations", "--m", "12", "--kind", "dlt", "--format", "table", doc=resolved.getvalue())

# %%
cli("export", "--m", "7")
cli("components")
