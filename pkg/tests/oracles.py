"""Reference computations that share no code with the package.

Affine edwards25519 arithmetic with plain double-and-add, and a hash-and-
reduce written out directly from hashlib. Slow, obvious, and only used to
check the fast path.
"""

import hashlib

P = 2**255 - 19
ORDER = 2**252 + 27742317777372353535851937790883648493
D = (-121665 * pow(121666, P - 2, P)) % P

BASE_Y = 4 * pow(5, P - 2, P) % P


def _inv(x):
    return pow(x, P - 2, P)


def _recover_x(y, sign):
    xx = (y * y - 1) * _inv(D * y * y + 1) % P
    x = pow(xx, (P + 3) // 8, P)
    if (x * x - xx) % P != 0:
        x = x * pow(2, (P - 1) // 4, P) % P
    assert (x * x - xx) % P == 0
    if x % 2 != sign:
        x = P - x
    return x


BASE = (_recover_x(BASE_Y, 0), BASE_Y)
NEUTRAL = (0, 1)


def add(p1, p2):
    x1, y1 = p1
    x2, y2 = p2
    k = D * x1 * x2 * y1 * y2 % P
    x3 = (x1 * y2 + x2 * y1) * _inv(1 + k) % P
    y3 = (y1 * y2 + x1 * x2) * _inv(1 - k) % P
    return x3, y3


def mul(s, pt):
    acc = NEUTRAL
    while s > 0:
        if s & 1:
            acc = add(acc, pt)
        pt = add(pt, pt)
        s >>= 1
    return acc


def encode(pt) -> bytes:
    x, y = pt
    return (y | ((x & 1) << 255)).to_bytes(32, "little")


def decode(raw: bytes):
    v = int.from_bytes(raw, "little")
    y = v & ((1 << 255) - 1)
    return _recover_x(y, v >> 255), y


def base_mul_bytes(s: int) -> bytes:
    return encode(mul(s % ORDER, BASE))


def mul_bytes(s: int, point_bytes: bytes) -> bytes:
    return encode(mul(s % ORDER, decode(point_bytes)))


def hash_and_reduce(tag: bytes, data: bytes) -> int:
    digest = hashlib.sha512(tag + data).digest()
    value = sum(b << (8 * i) for i, b in enumerate(digest))
    return value % ORDER
