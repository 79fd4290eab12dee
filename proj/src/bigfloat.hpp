#pragma once

// Minimal value wrapper over mpfr_t. Precision is taken from the MPFR default
// at construction; callers scope it with PrecisionScope.

#include <gmpxx.h>
#include <mpfr.h>

namespace glueforge::detail {

class PrecisionScope {
public:
    explicit PrecisionScope(mpfr_prec_t bits) : saved_(mpfr_get_default_prec()) { mpfr_set_default_prec(bits); }
    ~PrecisionScope() { mpfr_set_default_prec(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t saved_;
};

class Big {
public:
    Big() { mpfr_init_set_si(v_, 0, MPFR_RNDN); }
    Big(long double x) { mpfr_init_set_ld(v_, x, MPFR_RNDN); }
    Big(int x) { mpfr_init_set_si(v_, x, MPFR_RNDN); }
    explicit Big(const mpz_class& z) { mpfr_init_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }
    Big(const Big& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Big& operator=(const Big& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    ~Big() { mpfr_clear(v_); }

    long double ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }
    mpz_class round_int() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }

    Big& operator-=(const Big& o) {
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

#define GF_BIG_BINOP(op, fn)                                 \
    friend Big operator op(const Big& a, const Big& b) {     \
        Big r;                                               \
        fn(r.v_, a.v_, b.v_, MPFR_RNDN);                     \
        return r;                                            \
    }
    GF_BIG_BINOP(+, mpfr_add)
    GF_BIG_BINOP(-, mpfr_sub)
    GF_BIG_BINOP(*, mpfr_mul)
    GF_BIG_BINOP(/, mpfr_div)
#undef GF_BIG_BINOP

    friend Big operator-(const Big& a) {
        Big r;
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

#define GF_BIG_FN(name, fn)            \
    friend Big name(const Big& a) {    \
        Big r;                         \
        fn(r.v_, a.v_, MPFR_RNDN);     \
        return r;                      \
    }
    GF_BIG_FN(asinh, mpfr_asinh)
    GF_BIG_FN(tanh, mpfr_tanh)
    GF_BIG_FN(cosh, mpfr_cosh)
    GF_BIG_FN(exp, mpfr_exp)
    GF_BIG_FN(log, mpfr_log)
    GF_BIG_FN(sqrt, mpfr_sqrt)
    GF_BIG_FN(fabs, mpfr_abs)
#undef GF_BIG_FN

    friend Big hypot(const Big& a, const Big& b) {
        Big r;
        mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Big round(const Big& a) {
        Big r;
        mpfr_round(r.v_, a.v_);
        return r;
    }

    friend bool operator<(const Big& a, const Big& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const Big& a, const Big& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const Big& a, const Big& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator==(const Big& a, const Big& b) { return mpfr_equal_p(a.v_, b.v_); }

private:
    mpfr_t v_;
};

}  // namespace glueforge::detail
