import pytest

import unit_order_lab as uol

CAT = "2,1;1,1"


def naive_matrix_order(m, n):
    a, b, c, d = m
    x = (a % n, b % n, c % n, d % n)
    cur = x
    for k in range(1, 16 * n + 1):
        if cur == (1, 0, 0, 1):
            return k
        p, q, r, s = cur
        cur = ((p * x[0] + q * x[2]) % n, (p * x[1] + q * x[3]) % n,
               (r * x[0] + s * x[2]) % n, (r * x[1] + s * x[3]) % n)
    return None


def test_single_values():
    assert uol.integer_order(2, 7) == 3
    assert uol.matrix_order(CAT, 77) == 40
    assert uol.matrix_order([[2, 1], [1, 1]], 77) == 40
    assert uol.is_prime(2**61 - 1)
    assert uol.factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert uol.classify("0,-1;1,0") == "elliptic"


def test_matrix_order_matches_brute_force():
    for n in range(2, 300):
        assert uol.matrix_order(CAT, n) == naive_matrix_order((2, 1, 1, 1), n)


def test_errors():
    with pytest.raises(ValueError, match="elliptic"):
        uol.matrix_order("0,-1;1,0", 97)
    with pytest.raises(uol.InvalidInput):
        uol.integer_order(2, 8)
    with pytest.raises(uol.ResourceLimit):
        uol.scan_primes(matrix=CAT, limit=10**9)


def test_field_and_census():
    info = uol.field_info(CAT)
    assert info["field_disc"] == 5
    assert uol.kummer_degree_interval(CAT, 2) == (4, 4)
    census = uol.lemma_simple_census(CAT, 2)
    assert census["M"] == 5
    assert census["low_order_primes"] == []
    big = uol.lemma_simple_census(CAT, 40)
    assert big["divisor_check"]
    assert all(big["M"] % p == 0 for p in big["low_order_primes"])


def test_scans_are_worker_independent():
    one = uol.scan_primes(matrix=CAT, limit=200_000, workers=1, with_timing=False)
    four = uol.scan_primes(matrix=CAT, limit=200_000, workers=4, with_timing=False)
    assert one == four
    assert one["partial"] is False
    assert sum(row["primes"] for row in one["tables"]["prime_decades"]) == 17_984


def test_composite_scan():
    r = uol.scan_composites(base=2, limit=1000)
    rows = r["tables"]["composite_decades"]
    assert sum(row["skipped"] for row in rows) == 500
    assert sum(row["scanned"] for row in rows) == 499
