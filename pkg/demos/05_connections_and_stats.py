"""Build connection profiles from clone pairs and run the rank statistics.

Every clone pair connects the two notebooks that contain its snippets,
forming a multigraph. A notebook's profile splits its edges into
same-repository connections (c0) and per-external-repository counts,
whose mean and sum are ic and sc. The demo wires up a tiny graph, checks
the paired tests comparing c0 against ic and sc, and shows the rest of
the statistics kernel on small vectors.
"""

from nbclones import connections, ingest, stats
from nbclones.ingest import ParseStatus


def record(nb: str, repo: str, *texts: str) -> ingest.NotebookRecord:
    cells = tuple(
        ingest.Snippet(nb, i, (t,), 1, 1, 1) for i, t in enumerate(texts)
    )
    return ingest.NotebookRecord(
        nb, repo, 0, nb, ParseStatus.OK, cells, ingest.EMPTY_EVIDENCE
    )


def main() -> None:
    records = [
        record("alpha", "repo1", "a", "b", "c"),
        record("beta", "repo1", "a", "d"),
        record("gamma", "repo2", "a", "b"),
    ]
    # clone pairs between snippets: (notebook, cell) on each side
    pairs = [
        (("alpha", 0), ("beta", 0)),    # within repo1
        (("alpha", 0), ("gamma", 0)),   # crosses into repo2
        (("beta", 0), ("gamma", 0)),
        (("alpha", 1), ("gamma", 1)),
        (("alpha", 0), ("alpha", 2)),   # self-loop: both ends in alpha
    ]
    profiles = connections.build_connection_profiles(pairs, records)
    print("connection profiles:")
    for p in profiles:
        print(
            f"  {p.notebook_id:6s} total={p.total} normalized={p.normalized:.2f}"
            f" c0={p.c0} per_repo={dict(p.per_repo)} ic={p.ic:.1f} sc={p.sc}"
        )

    c0_vs_ic, c0_vs_sc = connections.paired_connection_tests(profiles)
    print("\npaired signed-rank tests over the profiles:")
    print(f"  c0 vs ic: V={c0_vs_ic.statistic}, p={stats.format_p(c0_vs_ic.p_value)}")
    print(f"  c0 vs sc: V={c0_vs_sc.statistic}, p={stats.format_p(c0_vs_sc.p_value)}")

    print("\nkernel on small vectors:")
    rho = stats.spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
    print(f"  spearman rho={rho.statistic:.3f}, p={stats.format_p(rho.p_value)}")
    kw = stats.kruskal_wallis([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    print(f"  kruskal-wallis H={kw.statistic:.3f}, p={stats.format_p(kw.p_value)}")
    adjusted = stats.hochberg_adjust([0.01, 0.02, 0.04])
    print(f"  hochberg([0.01, 0.02, 0.04]) = {adjusted}")


if __name__ == "__main__":
    main()
