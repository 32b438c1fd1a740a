/* Inner loops for the grid kernels; kept in C so the compiler can vectorize
 * over restrict-qualified arrays. */
#ifndef MELLINSURV_KERNELS_IMPL_H
#define MELLINSURV_KERNELS_IMPL_H

#include <stddef.h>

#define MS_LANES 8

/* One grid row: acc = sum(z), then z <- z * r elementwise. npad % MS_LANES == 0. */
static void ms_sum_rotate(double *restrict zr, double *restrict zi,
                          const double *restrict rr, const double *restrict ri,
                          ptrdiff_t npad, double *restrict acc)
{
    double sr[MS_LANES] = {0}, si[MS_LANES] = {0};
    for (ptrdiff_t b = 0; b < npad; b += MS_LANES) {
        for (int k = 0; k < MS_LANES; ++k) {
            const double x = zr[b + k], y = zi[b + k];
            sr[k] += x;
            si[k] += y;
            zr[b + k] = x * rr[b + k] - y * ri[b + k];
            zi[b + k] = x * ri[b + k] + y * rr[b + k];
        }
    }
    double x = 0.0, y = 0.0;
    for (int k = 0; k < MS_LANES; ++k) {
        x += sr[k];
        y += si[k];
    }
    acc[0] = x;
    acc[1] = y;
}

/* One Horner step: a <- a * z + c for every evaluation point. */
static void ms_horner_step(double *restrict ar, double *restrict ai,
                           const double *restrict zr, const double *restrict zi,
                           double cr, double ci, ptrdiff_t nq)
{
    for (ptrdiff_t q = 0; q < nq; ++q) {
        const double x = ar[q], y = ai[q];
        ar[q] = x * zr[q] - y * zi[q] + cr;
        ai[q] = x * zi[q] + y * zr[q] + ci;
    }
}

#endif
