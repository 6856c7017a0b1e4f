#pragma once
// Execution selector for kernels that keep a serial reference implementation
// next to the OpenMP one. Both paths must return identical results.

namespace bcpid {

enum class Execution { Serial, OpenMP };

int hardware_threads();

}  // namespace bcpid
