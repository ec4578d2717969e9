"""Exact number theory: factorization, prime powers, inverses, binomials mod m."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import HypothesisError, NotInvertibleError, ParameterError

TRIAL_LIMIT = 10**6
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=1)
def small_primes() -> tuple[int, ...]:
    sieve = bytearray([1]) * (TRIAL_LIMIT + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(TRIAL_LIMIT) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, TRIAL_LIMIT + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with fixed bases; deterministic for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    # deterministic: walk c = 1, 2, ... until a proper factor shows up
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


@dataclass(frozen=True)
class Factorization:
    prime_powers: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.prime_powers)

    def value(self) -> int:
        return math.prod(p**e for p, e in self.prime_powers)

    def __iter__(self):
        return iter(self.prime_powers)

    def __len__(self) -> int:
        return len(self.prime_powers)


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def factorize(m: int) -> Factorization:
    """Complete factorization of ``m >= 2`` as increasing (prime, exponent) pairs.

    Trial division by primes below 10**6, then Miller-Rabin plus Pollard rho
    for whatever cofactor remains.
    """
    if m < 2:
        raise ParameterError(f"factorize needs m >= 2, got {m}")
    found: dict[int, int] = {}
    rest = m
    for p in small_primes():
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            found[p] = e
    if rest > 1:
        if rest < TRIAL_LIMIT * TRIAL_LIMIT:
            found[rest] = found.get(rest, 0) + 1
        else:
            _split(rest, found)
    return Factorization(tuple(sorted(found.items())))


def prime_power(m: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` if ``m == p**k`` for a prime p, else None."""
    f = factorize(m)
    if len(f) == 1:
        return f.prime_powers[0]
    return None


def largest_prime_factor(m: int) -> int:
    return factorize(m).prime_powers[-1][0]


def odd_part_radical(m: int) -> int:
    """Product of the distinct odd primes dividing m (1 if there are none)."""
    if m < 2:
        return 1
    return math.prod(p for p, _ in factorize(m) if p != 2)


def mod_inverse(c: int, m: int) -> int:
    if m < 2:
        raise ParameterError(f"modulus must be >= 2, got {m}")
    if math.gcd(c, m) != 1:
        raise NotInvertibleError(f"{c} is not invertible mod {m}")
    return pow(c, -1, m)


def crt(residues: list[int], moduli: list[int]) -> int:
    """Combine residues for pairwise coprime moduli."""
    x, mod = 0, 1
    for r, m in zip(residues, moduli):
        t = (r - x) * pow(mod, -1, m) % m
        x += mod * t
        mod *= m
    return x % mod


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ParameterError("valuation of 0 is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _legendre(n: int, p: int) -> int:
    v = 0
    while n:
        n //= p
        v += n
    return v


def binomial_mod_prime(N: int, K: int, p: int) -> int:
    """Lucas: product of digit binomials in base p."""
    res = 1
    while N or K:
        n_i, k_i = N % p, K % p
        if k_i > n_i:
            return 0
        res = res * math.comb(n_i, k_i) % p
        N //= p
        K //= p
    return res


@lru_cache(maxsize=256)
def _unit_prefix(p: int, q: int) -> tuple[int, ...]:
    # prefix[i] = product of 1..i with multiples of p skipped, mod q
    out = [1] * q
    acc = 1
    for i in range(1, q):
        if i % p:
            acc = acc * i % q
        out[i] = acc
    return tuple(out)


def _stripped_factorial(n: int, p: int, q: int) -> int:
    # n! with every factor of p removed, mod q = p**e
    table = _unit_prefix(p, q)
    full = table[q - 1]
    res = 1
    while n > 1:
        res = res * pow(full, n // q, q) % q * table[n % q] % q
        n //= p
    return res


def binomial_mod_prime_power(N: int, K: int, p: int, e: int) -> int:
    q = p**e
    if e == 1:
        return binomial_mod_prime(N, K, p)
    v = _legendre(N, p) - _legendre(K, p) - _legendre(N - K, p)
    if v >= e:
        return 0
    num = _stripped_factorial(N, p, q)
    den = _stripped_factorial(K, p, q) * _stripped_factorial(N - K, p, q) % q
    return pow(p, v, q) * num % q * pow(den, -1, q) % q


def binomial_mod(N: int, K: int, m: int, *, bignum: bool = False) -> int:
    """C(N, K) mod m without materializing the binomial.

    Each prime-power factor of m is handled separately (Lucas for exponent 1,
    stripped factorials with a carry count otherwise) and the pieces are
    recombined by CRT. ``bignum=True`` takes the slow reference route.
    """
    if m < 2:
        raise ParameterError(f"modulus must be >= 2, got {m}")
    if K < 0 or N < 0 or K > N:
        raise ParameterError(f"need 0 <= K <= N, got N={N}, K={K}")
    if bignum:
        return math.comb(N, K) % m
    residues, moduli = [], []
    for p, e in factorize(m):
        residues.append(binomial_mod_prime_power(N, K, p, e))
        moduli.append(p**e)
    return crt(residues, moduli)


def odd_lemma_m(n: int) -> int:
    """The m >= 1 with n = 2**m - 1 (mod 2**(m+1)) for odd n not of the form 2**k - 1."""
    if n < 1 or n % 2 == 0:
        raise HypothesisError(f"n must be a positive odd integer, got {n}")
    if (n + 1) & n == 0:
        raise HypothesisError(f"n = {n} has the excluded form 2**k - 1")
    m = valuation(n + 1, 2)
    assert n % 2 ** (m + 1) == 2**m - 1
    return m
