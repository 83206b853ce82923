"""Small CLI configurations shared by the CLI tests and the golden-schema files."""

CASES = {
    "sieve": ["--limit", "20000", "--grid", "1024", "--checkpoints", "1000 10000"],
    "words": ["--params", "chacon", "--stages", "4", "--dump-words"],
    "measure": ["--params", "tripling", "--stages", "6", "--word", "1"],
    "avg": ["--model", "integer-shift", "--observable", "mobius", "--checkpoints", "100 1000"],
    "hopf": ["--model", "boole", "--x0", "0.3", "--observable", "interval:0:1", "--weight", "none",
             "--checkpoints", "100 1000"],
    "dkbsz": ["--model", "rank-one", "--params", "chacon", "--observable", "centered:0",
              "--p", "2", "--q", "3", "--checkpoints", "100 300", "--grid", "2048"],
    "spectra": ["--params", "chacon", "--stages", "3", "--grid", "256"],
    "hellinger": ["--params", "chacon", "--stages", "3", "--p", "2", "--q", "3", "--grid", "1024"],
    "klemes": ["--params", "chacon", "--truncation", "3", "--eta", "0"],
    "peyriere": ["--params", "chacon", "--p", "2", "--q", "3", "--truncation", "4"],
    "divergence": ["--params", "chacon", "--horizon", "12"],
}
