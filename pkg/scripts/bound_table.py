"""C_K and mu(K) table, case values and the grid-oracle cross-check."""
from gathersim.analysis import mu_bound
from gathersim.polygon_bounds import brute_force_min, breakpoint_scan, theorem1_bound

print(" n  argmin     C_n          mu(n)      h(n)")
for row in breakpoint_scan(30):
    n = row["n"]
    mark = "  <- branch switch" if n == 7 else ""
    print(f"{n:>2}  {row['argmin']:<9} {row['bound']:>11.6f}  {mu_bound(n):>9.5f}  "
          f"{row['h']:>9.4f}{mark}")
print("\ngrid oracle (resolution 0.01):")
for n in range(3, 9):
    r = brute_force_min(n, 0.01)
    print(f" n={n}  oracle {r.value:.10f}  closed form {theorem1_bound(n):.10f}")
