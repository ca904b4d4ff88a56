"""Window sums against pi H / 4 at growing scales, with a log-log fit of the residual."""
from circleverify import build_prime_table
from circleverify.verify import scan

table = build_prime_table(10 ** 6)
schedule = [(10 ** k, int(10 ** (0.7 * k))) for k in (6, 7, 8, 9)]
for theorem in ("T1", "T3"):
    rep = scan(theorem, schedule, table)
    for r in rep.runs:
        print(f"{theorem} N=1e{len(str(r.N)) - 1} H={r.H:<8d} sum {r.exact_sum:14.2f}  main {r.main_term:14.2f}  rel {r.relative_error:+.4f}")
    print(f"    |residual| ~ N^{rep.fit.slope:.3f} (r^2 = {rep.fit.r_squared:.3f})")
