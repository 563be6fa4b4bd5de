"""Brute-force reference implementations, written with plain Python loops and
sharing no code with the package."""
import itertools
import math


def sq_dist(u, v):
    return sum((a - b) ** 2 for a, b in zip(u, v))


def column(M, j):
    return [M[i][j] for i in range(len(M))]


def composite_argmin(mats, H, V, Vh, w, beta):
    """Per-sample argmin over clusters of the blended distance, lowest index on ties."""
    N = len(H[0])
    C = len(Vh[0])
    out = []
    for j in range(N):
        best, best_s = None, None
        for s in range(C):
            d = beta * sq_dist(column(H, j), column(Vh, s))
            vis = 0.0
            for wk, X, Vk in zip(w, mats, V):
                vis += wk * sq_dist(column(X, j), column(Vk, s))
            d += (1 - beta) * vis
            if best is None or d < best:
                best, best_s = d, s
        out.append(best_s)
    return out


def pair_enumeration(labels, assignment):
    """(f00, f11, same-cluster-different-class) by looping over all pairs."""
    f00 = f11 = f10 = 0
    n = len(labels)
    for i in range(n):
        for j in range(i + 1, n):
            same_class = labels[i] == labels[j]
            same_cluster = assignment[i] == assignment[j]
            if same_class and same_cluster:
                f11 += 1
            elif not same_class and not same_cluster:
                f00 += 1
            elif same_cluster:
                f10 += 1
    return f00, f11, f10


def nmi_terms(labels, assignment):
    """NMI with geometric normalization, summed term by term."""
    N = len(labels)
    classes = sorted(set(labels))
    clusters = sorted(set(assignment))
    num = 0.0
    for i in classes:
        for j in clusters:
            nij = sum(1 for a, b in zip(labels, assignment) if a == i and b == j)
            if nij == 0:
                continue
            ni = labels.count(i)
            nj = assignment.count(j)
            num += nij * math.log(N * nij / (ni * nj))
    hi = sum(labels.count(i) * math.log(labels.count(i) / N) for i in classes)
    hj = sum(assignment.count(j) * math.log(assignment.count(j) / N) for j in clusters)
    return num / math.sqrt(hi * hj)


def best_partition_cost(points, C):
    """Minimum K-means cost over every labeling of the points into <= C groups."""
    best = math.inf
    n = len(points)
    for lab in itertools.product(range(C), repeat=n):
        cost = 0.0
        for c in range(C):
            members = [points[j] for j in range(n) if lab[j] == c]
            if not members:
                continue
            dim = len(members[0])
            mean = [sum(p[d] for p in members) / len(members) for d in range(dim)]
            cost += sum(sq_dist(p, mean) for p in members)
        best = min(best, cost)
    return best


def simplex_points(rng, K, n):
    """n random points on the probability simplex (flat Dirichlet), plus vertices."""
    pts = rng.dirichlet([1.0] * K, size=n).tolist()
    for k in range(K):
        v = [0.0] * K
        v[k] = 1.0
        pts.append(v)
    return pts


def entropy_objective(costs, weights, temperature):
    """sum_k w_k c_k + t sum_k w_k ln w_k, with 0 ln 0 = 0."""
    val = sum(w * c for w, c in zip(weights, costs))
    val += temperature * sum(w * math.log(w) for w in weights if w > 0)
    return val
