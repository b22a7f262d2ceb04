"""32-bit range coder with adaptive frequency models.

The encoder keeps a 33-bit ``low`` and propagates carries through a cached
output byte, so the stream needs no bit stuffing.  All state is integer, which
makes the output identical on every platform.
"""

from __future__ import annotations

from ..errors import FormatError

TOP = 1 << 24
MASK32 = 0xFFFFFFFF
INCREMENT = 32
RESCALE_LIMIT = 1 << 16


class AdaptiveModel:
    """Order-0 adaptive frequencies over ``n`` symbols, stored in a Fenwick tree."""

    def __init__(self, n: int, increment: int = INCREMENT, limit: int = RESCALE_LIMIT):
        if n < 1:
            raise ValueError("alphabet must be nonempty")
        if n + increment >= limit:
            raise ValueError(f"alphabet of {n} symbols does not fit below total {limit}")
        self.n = n
        self.increment = increment
        self.limit = limit
        self.freq = [1] * n
        self._size = 1 << (n - 1).bit_length() if n > 1 else 1
        self._rebuild()

    def _rebuild(self):
        size = self._size
        tree = [0] * (size + 1)
        tree[1 : self.n + 1] = self.freq
        for i in range(1, size + 1):
            j = i + (i & -i)
            if j <= size:
                tree[j] += tree[i]
        self._tree = tree
        self.total = sum(self.freq)

    def cumulative(self, s: int) -> int:
        """Sum of frequencies of symbols ``< s``."""
        tree = self._tree
        total = 0
        while s > 0:
            total += tree[s]
            s &= s - 1
        return total

    def find(self, target: int) -> tuple[int, int]:
        """Symbol whose cumulative interval contains ``target``, and its low end."""
        tree = self._tree
        pos = 0
        low = 0
        bit = self._size
        while bit:
            nxt = pos + bit
            if nxt <= self._size and low + tree[nxt] <= target:
                pos = nxt
                low += tree[nxt]
            bit >>= 1
        return pos, low

    def update(self, s: int):
        inc = self.increment
        self.freq[s] += inc
        self.total += inc
        if self.total >= self.limit:
            self.freq = [(f + 1) >> 1 for f in self.freq]
            self._rebuild()
            return
        tree = self._tree
        i = s + 1
        size = self._size
        while i <= size:
            tree[i] += inc
            i += i & -i


class RangeEncoder:
    def __init__(self):
        self.low = 0
        self.range = MASK32
        self._cache = 0
        self._cache_size = 1
        self.out = bytearray()

    def _shift_low(self):
        low = self.low
        if low < 0xFF000000 or low > MASK32:
            carry = low >> 32
            temp = self._cache
            out = self.out
            while True:
                out.append((temp + carry) & 0xFF)
                temp = 0xFF
                self._cache_size -= 1
                if not self._cache_size:
                    break
            self._cache = (low >> 24) & 0xFF
        self._cache_size += 1
        self.low = (low << 8) & MASK32

    def encode(self, cum: int, freq: int, total: int):
        r = self.range // total
        self.low += r * cum
        self.range = r * freq
        while self.range < TOP:
            self.range <<= 8
            self._shift_low()

    def encode_symbol(self, model: AdaptiveModel, s: int):
        self.encode(model.cumulative(s), model.freq[s], model.total)
        model.update(s)

    def encode_bits(self, value: int, nbits: int):
        """Store ``nbits`` raw bits, 16 at a time with a flat distribution."""
        while nbits > 0:
            chunk = min(16, nbits)
            nbits -= chunk
            self.encode((value >> nbits) & ((1 << chunk) - 1), 1, 1 << chunk)

    def finish(self) -> bytes:
        for _ in range(5):
            self._shift_low()
        return bytes(self.out)


class RangeDecoder:
    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.pos = 0
        self.offset = offset
        self.range = MASK32
        self.code = 0
        for _ in range(5):
            self.code = (self.code << 8) | self._next()
        self.code &= MASK32

    def _next(self) -> int:
        if self.pos >= len(self.data):
            raise FormatError("range-coded stream is truncated", self.offset + self.pos)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def _normalize(self):
        while self.range < TOP:
            self.code = ((self.code << 8) | self._next()) & MASK32
            self.range <<= 8

    def decode_target(self, total: int) -> tuple[int, int]:
        r = self.range // total
        value = self.code // r
        if value >= total:
            raise FormatError("range-coded stream is corrupt", self.offset + self.pos)
        return value, r

    def consume(self, r: int, cum: int, freq: int):
        self.code -= r * cum
        self.range = r * freq
        self._normalize()

    def decode_symbol(self, model: AdaptiveModel) -> int:
        value, r = self.decode_target(model.total)
        s, cum = model.find(value)
        self.consume(r, cum, model.freq[s])
        model.update(s)
        return s

    def decode_bits(self, nbits: int) -> int:
        value = 0
        while nbits > 0:
            chunk = min(16, nbits)
            nbits -= chunk
            v, r = self.decode_target(1 << chunk)
            self.consume(r, v, 1)
            value = (value << chunk) | v
        return value


def encode_symbols(model: AdaptiveModel, symbols) -> bytes:
    enc = RangeEncoder()
    for s in symbols:
        enc.encode_symbol(model, int(s))
    return enc.finish()


def decode_symbols(model: AdaptiveModel, data: bytes, count: int) -> list[int]:
    dec = RangeDecoder(data)
    return [dec.decode_symbol(model) for _ in range(count)]
