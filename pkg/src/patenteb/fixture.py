"""Synthetic patent-family fixture with recorded ground truth.

Generates a desk-scale corpus (default ~5,000 retained families across 30
domains) whose citation edges are planted per relation category, whose
abstracts cycle through the seven segment patterns, and whose citation
counts carry engineered early/late/normal archetypes. The generator returns
the raw records plus a truth dict (edge counts, per-domain sizes) computed
at creation, for use as oracles.
"""

from __future__ import annotations

import json
from pathlib import Path

from .seeds import rng_for

N_FAMILIES = 5000
N_DOMAINS = 30
PRE_1980 = 25

_COMMON_WORDS = None


def _word_pool() -> list[str]:
    global _COMMON_WORDS
    if _COMMON_WORDS is None:
        onsets = ["br", "cl", "dr", "fl", "gr", "pl", "st", "tr", "sp", "cr", "m", "n", "v", "z"]
        nuclei = ["a", "e", "i", "o", "u", "ae", "io"]
        codas = ["x", "n", "r", "st", "ck", "mp", "ld", "sh"]
        words = []
        for o in onsets:
            for nu in nuclei:
                for c in codas:
                    words.append(o + nu + c)
        _COMMON_WORDS = words[:300]
    return _COMMON_WORDS


def _domain_codes(n: int) -> list[str]:
    return [f"{chr(ord('A') + i % 8)}{10 + i:02d}" for i in range(n)]


def _jargon(domain: str) -> list[str]:
    pool = _word_pool()
    base = (ord(domain[0]) * 7 + int(domain[1:])) % len(pool)
    return [pool[(base + 13 * k) % len(pool)] + domain.lower() for k in range(14)]


def _phrase(rng, domain: str, n_words: int, unique: str | None = None) -> str:
    jargon = _jargon(domain)
    pool = _word_pool()
    words = []
    for _ in range(n_words):
        if rng.random() < 0.55:
            words.append(jargon[int(rng.integers(0, len(jargon)))])
        else:
            words.append(pool[int(rng.integers(0, len(pool)))])
    if unique is not None:
        words.insert(int(rng.integers(0, len(words) + 1)), unique)
    return " ".join(words)


def _abstract(rng, domain: str, idx: int, fid: str) -> str:
    """Cycle the seven patterns (idx % 8 == 7 yields a plain abstract)."""
    kind = idx % 8
    prob = _phrase(rng, domain, int(rng.integers(8, 14)), f"pq{fid}")
    sol = _phrase(rng, domain, int(rng.integers(8, 14)), f"sq{fid}")
    eff1 = _phrase(rng, domain, int(rng.integers(5, 9)), f"eq{fid}")
    eff2 = _phrase(rng, domain, int(rng.integers(4, 7)))
    subst = _phrase(rng, domain, int(rng.integers(6, 10)), f"bq{fid}")
    fielda = _phrase(rng, domain, 3)
    fieldb = _phrase(rng, domain, 3, f"fq{fid}")
    if kind == 0:
        text = f"PROBLEM TO BE SOLVED: {prob} SOLUTION: {sol}"
    elif kind == 1:
        text = f"PROBLEM: {prob} SOLUTION: {sol}"
    elif kind == 2:
        text = f"PURPOSE: {prob} CONSTITUTION: {sol}"
    elif kind == 3:
        text = f"[problem] {prob} [solution] {sol}"
    elif kind == 4:
        text = f"FIELD: {fielda}, {fieldb} SUBSTANCE: {subst} EFFECT: {eff1}. {eff2}."
    elif kind == 5:
        text = f"SOLUTION: {sol} EFFECT: {eff1}. {eff2}."
    elif kind == 6:
        text = f"{prob} SOLUTION: {sol}"
    else:
        if idx % 23 == 0:
            return ""
        text = _phrase(rng, domain, int(rng.integers(12, 20)), f"aq{fid}")
    if idx % 5 == 0:
        text += f" SELECTED DRAWING: Figure {1 + idx % 9}"
    return text


def generate_fixture(
    seed: int = 42, n_families: int = N_FAMILIES, n_domains: int = N_DOMAINS
) -> tuple[list[dict], dict]:
    """Build raw corpus records plus the ground-truth dict."""
    domains = _domain_codes(n_domains)
    records: list[dict] = []
    sig_of: dict[str, frozenset[str]] = {}
    dom_of: dict[str, str] = {}
    by_sig_kind: dict[tuple[str, str], list[str]] = {}  # (domain, "single"/"multi") -> ids

    rng = rng_for(seed, "fixture", "families")
    for i in range(n_families + PRE_1980):
        fid = f"F{i:05d}"
        domain = domains[i % n_domains]
        dom_of[fid] = domain
        draw = rng.random()
        if draw < 0.60:
            codes = [domain, domain] if rng.random() < 0.15 else [domain]
            kind = "single"
        elif draw < 0.85:
            other = domains[(i + 1 + int(rng.integers(0, n_domains - 1))) % n_domains]
            if other == domain:
                other = domains[(domains.index(domain) + 1) % n_domains]
            codes = [domain, domain, other]
            kind = "multi"
        else:
            pool = [d for d in domains if d != domain]
            o1 = pool[int(rng.integers(0, len(pool)))]
            o2 = pool[int(rng.integers(0, len(pool)))]
            if o2 == o1:
                o2 = pool[(pool.index(o1) + 1) % len(pool)]
            codes = [domain, domain, o1, o2]
            kind = "multi"
        sig_of[fid] = frozenset(codes)
        by_sig_kind.setdefault((domain, kind), []).append(fid)

        if i >= n_families:
            year = 1975 + int(rng.integers(0, 5))
        elif rng.random() < 0.05:
            year = 2024
        else:
            year = 1980 + int(rng.integers(0, 43))
        month = 1 + int(rng.integers(0, 12))
        day = 1 + int(rng.integers(0, 28))

        archetype_draw = rng.random()
        if archetype_draw < 0.10:
            c5 = 500 + int(rng.integers(0, 500))
            ct = c5 + int(rng.integers(0, 100))
        elif archetype_draw < 0.20:
            c5 = int(rng.integers(0, 2))
            ct = 2000 + int(rng.integers(0, 1000))
        else:
            c5 = 10 + int(rng.integers(0, 90))
            ct = c5 + 10 + int(rng.integers(0, 200))

        inventors = [f"inv_{domain}_{int(rng.integers(0, 6))}"]
        if rng.random() < 0.5:
            second = f"inv_{domain}_{int(rng.integers(0, 6))}"
            if second not in inventors:
                inventors.append(second)

        records.append(
            {
                "family_id": fid,
                "title": _phrase(rng, domain, int(rng.integers(4, 8)), f"tq{fid}"),
                "abstract": _abstract(rng, domain, i, fid),
                "first_claim": "A " + _phrase(rng, domain, int(rng.integers(10, 18)), f"cq{fid}") + " .",
                "ipc_codes": codes,
                "inventors": inventors,
                "filing_date": f"{year:04d}-{month:02d}-{day:02d}",
                "cites": [],
                "cited_by_count_5y": c5,
                "cited_by_count_total": ct,
            }
        )

    index = {r["family_id"]: r for r in records}

    def plant(a: str, b: str, edge_set: set[tuple[str, str]]) -> bool:
        if a == b:
            return False
        key = (min(a, b), max(a, b))
        if key in edge_set:
            return False
        index[a]["cites"].append(b)
        edge_set.add(key)
        return True

    edge_rng = rng_for(seed, "fixture", "edges")
    edges: set[tuple[str, str]] = set()
    planted = {"IN": 0, "OUT": 0, "FULL_MIX": 0, "PART_MIX": 0}

    # IN edges: identical singleton signatures within a domain.
    for domain in domains:
        singles = by_sig_kind.get((domain, "single"), [])
        if len(singles) < 2:
            continue
        target = int(len(singles) * 2.5)
        added = 0
        attempts = 0
        while added < target and attempts < target * 20:
            attempts += 1
            a = singles[int(edge_rng.integers(0, len(singles)))]
            b = singles[int(edge_rng.integers(0, len(singles)))]
            if plant(a, b, edges):
                added += 1
        planted["IN"] += added

    # OUT edges: disjoint signatures across domains.
    all_ids = [r["family_id"] for r in records]
    want_out = int(n_families * 0.5)
    attempts = 0
    while planted["OUT"] < want_out and attempts < want_out * 30:
        attempts += 1
        a = all_ids[int(edge_rng.integers(0, len(all_ids)))]
        b = all_ids[int(edge_rng.integers(0, len(all_ids)))]
        if sig_of[a] & sig_of[b]:
            continue
        if plant(a, b, edges):
            planted["OUT"] += 1

    # FULL_MIX edges: singleton {dom} cited by a strict superset {dom, ...}.
    want_fm = int(n_families * 0.3)
    attempts = 0
    while planted["FULL_MIX"] < want_fm and attempts < want_fm * 30:
        attempts += 1
        domain = domains[int(edge_rng.integers(0, len(domains)))]
        singles = by_sig_kind.get((domain, "single"), [])
        multis = by_sig_kind.get((domain, "multi"), [])
        if not singles or not multis:
            continue
        a = singles[int(edge_rng.integers(0, len(singles)))]
        b = multis[int(edge_rng.integers(0, len(multis)))]
        if sig_of[a] < sig_of[b] and plant(a, b, edges):
            planted["FULL_MIX"] += 1

    # PART_MIX edges: overlapping multi-code signatures, neither containing the other.
    want_pm = int(n_families * 0.3)
    attempts = 0
    while planted["PART_MIX"] < want_pm and attempts < want_pm * 30:
        attempts += 1
        domain = domains[int(edge_rng.integers(0, len(domains)))]
        multis = by_sig_kind.get((domain, "multi"), [])
        if len(multis) < 2:
            continue
        a = multis[int(edge_rng.integers(0, len(multis)))]
        b = multis[int(edge_rng.integers(0, len(multis)))]
        sa, sb = sig_of[a], sig_of[b]
        if sa & sb and not sa <= sb and not sb <= sa and plant(a, b, edges):
            planted["PART_MIX"] += 1

    # Dangling citations and self-loops exercise graph hygiene.
    dangling = 0
    for k in range(50):
        fid = all_ids[int(edge_rng.integers(0, len(all_ids)))]
        index[fid]["cites"].append(f"FX9{k:04d}")
        dangling += 1
    for fid in all_ids[:3]:
        index[fid]["cites"].append(fid)

    directed = sum(len(r["cites"]) for r in records)
    truth = {
        "n_records": len(records),
        "n_retained_expected": n_families,
        "domains": domains,
        "planted_edges": planted,
        "undirected_edges": len(edges),
        "directed_citations": directed,
        "dangling_citations": dangling,
        "self_loops": 3,
        "seed": seed,
    }
    return records, truth


def write_fixture(
    out_path: str | Path,
    seed: int = 42,
    n_families: int = N_FAMILIES,
    n_domains: int = N_DOMAINS,
    format: str | None = None,
) -> dict:
    """Write the fixture corpus (Parquet or JSONL by suffix); returns truth."""
    records, truth = generate_fixture(seed=seed, n_families=n_families, n_domains=n_domains)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if format is None:
        format = "parquet" if out_path.suffix == ".parquet" else "jsonl"
    if format == "parquet":
        import pyarrow as pa
        import pyarrow.parquet as pq

        schema = pa.schema(
            [
                ("family_id", pa.string()),
                ("title", pa.string()),
                ("abstract", pa.string()),
                ("first_claim", pa.string()),
                ("ipc_codes", pa.list_(pa.string())),
                ("inventors", pa.list_(pa.string())),
                ("filing_date", pa.string()),
                ("cites", pa.list_(pa.string())),
                ("cited_by_count_5y", pa.int64()),
                ("cited_by_count_total", pa.int64()),
            ]
        )
        columns = {name: [r[name] for r in records] for name in schema.names}
        pq.write_table(pa.table(columns, schema=schema), out_path)
    else:
        with out_path.open("w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
    truth_path = out_path.with_suffix(out_path.suffix + ".truth.json")
    truth_path.write_text(json.dumps(truth, indent=2, sort_keys=True))
    return truth
