# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled tape executor; see ``_kernels_py`` for the reference version."""

from libc.stdint cimport int64_t

DEF OP_COPY = 0
DEF OP_ADD = 1
DEF OP_SUB = 2
DEF OP_MUL = 3
DEF OP_NEG = 4
DEF OP_ROT = 5


cdef inline void _binary(int64_t op, int64_t* d, const int64_t* x, const int64_t* y,
                         Py_ssize_t S, int64_t t) noexcept nogil:
    cdef Py_ssize_t j
    cdef int64_t v
    if op == OP_ADD:
        for j in range(S):
            v = x[j] + y[j]
            d[j] = v - t if v >= t else v
    elif op == OP_SUB:
        for j in range(S):
            v = x[j] - y[j]
            d[j] = v + t if v < 0 else v
    else:
        for j in range(S):
            d[j] = (x[j] * y[j]) % t


def run_tape(int64_t[:, :, ::1] mem, const int64_t[:, ::1] consts, int64_t[:, ::1] tape, int64_t t):
    cdef Py_ssize_t r, i, j, src, B = mem.shape[1], S = mem.shape[2]
    cdef int64_t op, dst, a, b, k, x
    cdef const int64_t* cb
    with nogil:
        for r in range(tape.shape[0]):
            op = tape[r, 0]
            dst = tape[r, 1]
            a = tape[r, 2]
            b = tape[r, 3]
            k = tape[r, 4]
            if op == OP_ADD or op == OP_SUB or op == OP_MUL:
                if b < 0:
                    cb = &consts[-1 - b, 0]
                    for i in range(B):
                        _binary(op, &mem[dst, i, 0], &mem[a, i, 0], cb, S, t)
                else:
                    for i in range(B):
                        _binary(op, &mem[dst, i, 0], &mem[a, i, 0], &mem[b, i, 0], S, t)
            elif op == OP_NEG:
                for i in range(B):
                    for j in range(S):
                        x = mem[a, i, j]
                        mem[dst, i, j] = t - x if x else 0
            elif op == OP_ROT:
                for i in range(B):
                    src = k
                    for j in range(S):
                        mem[dst, i, j] = mem[a, i, src]
                        src += 1
                        if src == S:
                            src = 0
            elif op == OP_COPY:
                for i in range(B):
                    for j in range(S):
                        mem[dst, i, j] = mem[a, i, j]
