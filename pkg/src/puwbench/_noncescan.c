/* Sequential nonce scan for the cryptopuzzle backend.
 *
 * scan(prefix, start, stop, target) -> first nonce n in [start, stop) with
 * SHA-256(prefix || be64(n)) <= target, or -1.  Same contract as the pure
 * Python fallback in backends/cryptopuzzle.py.
 */
#define PY_SSIZE_T_CLEAN
#define OPENSSL_SUPPRESS_DEPRECATED
#include <Python.h>
#include <openssl/sha.h>
#include <string.h>
#include <stdint.h>

static PyObject *
scan(PyObject *self, PyObject *args)
{
    Py_buffer prefix, target;
    unsigned long long start, stop;
    long long found = -1;

    if (!PyArg_ParseTuple(args, "y*KKy*", &prefix, &start, &stop, &target))
        return NULL;
    if (prefix.len != 32 || target.len != 32) {
        PyBuffer_Release(&prefix);
        PyBuffer_Release(&target);
        PyErr_SetString(PyExc_ValueError, "prefix and target must be 32 bytes");
        return NULL;
    }

    Py_BEGIN_ALLOW_THREADS
    SHA256_CTX base, ctx;
    unsigned char nb[8], out[32];
    SHA256_Init(&base);
    SHA256_Update(&base, prefix.buf, 32);
    for (unsigned long long n = start; n < stop; n++) {
        for (int i = 0; i < 8; i++)
            nb[i] = (unsigned char)(n >> (56 - 8 * i));
        ctx = base;
        SHA256_Update(&ctx, nb, 8);
        SHA256_Final(out, &ctx);
        if (memcmp(out, target.buf, 32) <= 0) {
            found = (long long)n;
            break;
        }
    }
    Py_END_ALLOW_THREADS

    PyBuffer_Release(&prefix);
    PyBuffer_Release(&target);
    return PyLong_FromLongLong(found);
}

static PyMethodDef methods[] = {
    {"scan", scan, METH_VARARGS, "First valid nonce in [start, stop), or -1."},
    {NULL, NULL, 0, NULL}
};

static struct PyModuleDef module = {
    PyModuleDef_HEAD_INIT, "_noncescan", NULL, -1, methods
};

PyMODINIT_FUNC
PyInit__noncescan(void)
{
    return PyModule_Create(&module);
}
