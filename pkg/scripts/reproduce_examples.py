"""Print the worked examples: integrand, measure, exact result."""

from haarint import asymptotic, hciz_eigen, integrate, purity
from haarint.cli import to_text

EXAMPLES = [
    ("abs(U[1,1])^2", "U(d)"),
    ("abs(U[1,1])^2", "SU(d)"),
    ("U[1,1]*conj(U[1,2])*U[2,2]*conj(U[2,1])", "U(d)"),
    ("abs(tr(U))^4", "U(10)"),
    ("O[1,1]^2", "O(d)"),
    ("O[1,1]^4", "O(d)"),
    ("abs(Sp[1,1])^2*abs(Sp[1,2])^2", "Sp(d)"),
    ("abs(S[1,1])^2", "COE(d)"),
    ("abs(S[1,1])^2", "CSE(d)"),
    ("tr(U*A*U'*B)", "U(d)"),
    ("P[1,1]*P[2,2]", "Perm(d)"),
    ("Y[1,1]^2", "CPerm(d)"),
    ("abs(D[1,1])^2", "DiagU(d)"),
    ("abs(V[1,1])^2", "Stiefel(d,2)"),
    ("abs(V[1,1])^2*abs(V[2,2])^2", "Stiefel(d,2)"),
    ("tr(G*G')", "GinUE(d)"),
    ("tr(G*G')^2", "GinUE(d)"),
    ("tr(G*G'*G*G')", "GinUE(d)"),
    ("tr(H^2)", "GUE(d)"),
    ("tr(H^4)", "GUE(d)"),
    ("tr(H^6)", "GUE(d)"),
    ("tr(H^2)", "GOE(d)"),
    ("tr(H^2)", "GSE(d)"),
]


def main():
    width = max(len(e) for e, _ in EXAMPLES)
    for expr, measure in EXAMPLES:
        print(f"{expr:<{width}}  {measure:<13} {to_text(integrate(expr, measure))}")
    print()
    print("purity n=2,3:", purity(2), purity(3))
    print("|U11|^4, order 4:", asymptotic("abs(U[1,1])^4", "U(d)", 4))
    print("Page purity, order 5:", asymptotic("2*n/(n^2+1)", "n", 5))
    print("tr(UAU'BUCU'E), order 3:", asymptotic("tr(U*A*U'*B*U*C*U'*E)", "U(d)", 3))
    print("HCIZ a=b=(0,1):", hciz_eigen([0, 1], [0, 1]))


if __name__ == "__main__":
    main()
