// Timing comparison of the Heilbronn-matrix Hecke kernel (OpenMP over
// columns) against the serial modular-path reference, with an exact equality
// assertion between the two.  Usage: bench [level] [lmax]
#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "heckelab/intmath.hpp"
#include "heckelab/modsym.hpp"

using namespace heckelab;
using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int main(int argc, char** argv) {
    long N = argc > 1 ? std::atol(argv[1]) : 389;
    long lmax = argc > 2 ? std::atol(argv[2]) : 7;

    auto t0 = clock_type::now();
    SpacePtr space = build_space(N);
    CuspidalSubspace cusp = cuspidal_subspace(space);
    double t_setup = seconds_since(t0);
    std::cout << "level " << N << ": ambient dim " << space->dim() << ", cuspidal dim "
              << cusp.basis.cols() << " (setup " << t_setup << "s, " << omp_get_max_threads()
              << " threads)\n";

    for (long ell : primes_upto(lmax)) {
        t0 = clock_type::now();
        QMat heil = hecke_matrix(cusp, ell);
        double t_par = seconds_since(t0);

        t0 = clock_type::now();
        QMat ref = hecke_matrix_reference(cusp, ell);
        double t_ser = seconds_since(t0);

        bool same = heil == ref;
        std::cout << "T_" << ell << ": heilbronn+omp " << t_par << "s, serial reference " << t_ser
                  << "s, speedup x" << (t_par > 0 ? t_ser / t_par : 0.0)
                  << (same ? "" : "  ** MISMATCH **") << "\n";
        if (!same) return 1;
    }
    return 0;
}
