#pragma once
//
// Module      : wlra/baselines
// Description : reference solvers for comparison: EM-style imputation for the
//               weighted problem, plain alternating least squares, and RMSE
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wlra/random.hpp"
#include "wlra/solve.hpp"
#include "wlra/svd.hpp"

namespace wlra {

struct EmConfig
{
    std::size_t  max_iter         = 5000;
    double       tol              = 1e-10;
    // start from X = 0 when min(W_EM) ≤ this, otherwise from X = A
    double       weight_floor_eps = 1e-3;
};

struct EmResult
{
    Matrix                 x;
    // ‖(A − X_t) ⊙ W_EM‖_F² for every thresholded iterate X_1, X_2, ...
    // (the start X_0 = A is not rank-feasible and is left out)
    std::vector< double >  objective_trace;
    std::size_t            iterations = 0;
    bool                   converged  = false;
};

// (W1 𝟙) / max(W1); an empty W1 gives the all-ones weight
inline
Matrix
em_weights ( Matrix const &  w1, idx_t n )
{
    const double  wmax = w1.empty() ? 1.0 : max_abs( w1 );
    Matrix        w( w1.rows(), n, 1.0 );
    for ( idx_t  i = 0; i < w1.rows(); ++i )
        for ( idx_t  j = 0; j < w1.cols(); ++j )
            w( i, j ) = w1( i, j );
    w *= 1.0 / wmax;
    return w;
}

//
// EM iteration for  min ‖(A − X) ⊙ W_EM‖_F²,  rank X ≤ r:
//   X ← H_r( W_EM⊙W_EM⊙A + (𝟙 − W_EM⊙W_EM)⊙X ).
// W1 (m×k) weights the leading k columns, the rest carry weight 1 before
// rescaling by max(W1).
//
inline
EmResult
em_run ( Matrix const &  a, Matrix const &  w1, idx_t r, EmConfig const &  cfg = {} )
{
    const idx_t  m = a.rows();
    const idx_t  n = a.cols();

    if ( w1.rows() != m || w1.cols() > n )
        throw shape_error( "em: w1 must be m×k with k <= n" );
    for ( auto  w : w1.data() )
        if ( ! ( w > 0.0 ) )
            throw validation_error( "em: weights must be strictly positive" );
    if ( r > std::min( m, n ) )
        throw validation_error( "em: requires r <= min(m, n)" );
    if ( ! ( cfg.tol > 0.0 ) )
        throw validation_error( "em: requires tol > 0" );
    if ( cfg.max_iter < 1 )
        throw validation_error( "em: requires max_iter >= 1" );

    const auto  w  = em_weights( w1, n );
    const auto  w2 = hadamard( w, w );

    auto  weighted_obj = [&] ( Matrix const &  x ) { return frobenius_norm_squared( hadamard( a - x, w ) ); };

    EmResult  res;

    if ( numerical_rank( a ) <= r )
    {
        res.x         = a;
        res.converged = true;
        res.objective_trace.push_back( 0.0 );
        return res;
    }

    const double  wmin = *std::min_element( w.data().begin(), w.data().end() );
    Matrix        x    = wmin <= cfg.weight_floor_eps ? Matrix( m, n ) : a;

    Matrix  target( m, n );
    for ( std::size_t  it = 1; it <= cfg.max_iter; ++it )
    {
        for ( idx_t  i = 0; i < target.size(); ++i )
            target.data()[i] = w2.data()[i] * a.data()[i] + ( 1.0 - w2.data()[i] ) * x.data()[i];

        Matrix        xn   = hard_threshold( target, r );
        const double  step = frobenius_norm( xn - x );

        x = std::move( xn );
        res.objective_trace.push_back( weighted_obj( x ) );
        res.iterations = it;

        if ( step < cfg.tol )
        {
            res.converged = true;
            break;
        }
    }

    res.x = std::move( x );
    return res;
}

inline
Matrix
em_solve ( Matrix const &  a, Matrix const &  w1, idx_t r, EmConfig const &  cfg = {} )
{
    return em_run( a, w1, r, cfg ).x;
}

struct AlsResult
{
    Matrix                 b;
    Matrix                 d;
    // ‖A − B_t D_t‖_F² for the start and every iterate
    std::vector< double >  objective_trace;
    std::size_t            iterations = 0;
    bool                   converged  = false;

    Matrix approximation () const { return b * d; }
};

//
// Rank-r factorisation A ≈ B·D by alternating least squares, started from
// D standard normal and B = 0. Stops when ‖B'D' − BD‖_F < tol, or relative
// to ‖BD‖_F, or at max_iter.
//
inline
AlsResult
als_run ( Matrix const &  a, idx_t r, std::size_t max_iter = 2500, double tol = 1e-16, std::uint64_t seed = 0 )
{
    if ( r > std::min( a.rows(), a.cols() ) )
        throw validation_error( "als: requires r <= min(m, n)" );
    if ( ! ( tol > 0.0 ) )
        throw validation_error( "als: requires tol > 0" );
    if ( max_iter < 1 )
        throw validation_error( "als: requires max_iter >= 1" );

    AlsResult  res;
    Rng        rng( seed );
    res.d = random_normal( r, a.cols(), rng );
    res.b = Matrix( a.rows(), r );

    Matrix  bd = res.b * res.d;
    res.objective_trace.push_back( frobenius_norm_squared( a - bd ) );

    if ( r == 0 )
    {
        res.converged = true;
        return res;
    }

    for ( std::size_t  it = 1; it <= max_iter; ++it )
    {
        res.b = solve_least_squares_right( res.d, a ).x;
        res.d = solve_least_squares( res.b, a ).x;

        Matrix        bdn  = res.b * res.d;
        const double  err  = frobenius_norm( bdn - bd );
        const double  nrm  = frobenius_norm( bd );

        bd = std::move( bdn );
        res.objective_trace.push_back( frobenius_norm_squared( a - bd ) );
        res.iterations = it;

        if ( err < tol || ( nrm > 0.0 && err / nrm < tol ) )
        {
            res.converged = true;
            break;
        }
    }

    return res;
}

inline
Matrix
als_solve ( Matrix const &  a, idx_t r, std::size_t max_iter = 2500, double tol = 1e-16, std::uint64_t seed = 0 )
{
    return als_run( a, r, max_iter, tol, seed ).approximation();
}

// ‖A − Â‖_F / √(mn)
inline
double
rmse ( Matrix const &  a, Matrix const &  a_hat )
{
    detail::require_same_shape( a, a_hat, "rmse" );
    if ( a.empty() )
        return 0.0;
    return frobenius_norm( a - a_hat ) / std::sqrt( double( a.rows() ) * double( a.cols() ) );
}

} // namespace wlra
