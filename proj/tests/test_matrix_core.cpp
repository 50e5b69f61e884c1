#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <wlra/io.hpp>
#include <wlra/projection.hpp>
#include <wlra/qr.hpp>
#include <wlra/svd.hpp>

#include "test_util.hpp"

using namespace wlra;
using namespace wlra::test;

TEST( Matrix, RejectsNonFiniteEntries )
{
    EXPECT_THROW( Matrix( 1, 2, std::vector< double >{ 1.0, NAN } ), validation_error );
    EXPECT_THROW( Matrix( 2, 2, INFINITY ), validation_error );
    EXPECT_THROW( Matrix( 2, 2, std::vector< double >{ 1.0 } ), shape_error );
}

TEST( Matrix, Hadamard )
{
    Matrix  a{ { 1, 2 }, { 3, 4 } };
    EXPECT_EQ( hadamard( a, Matrix{ { 2, 0 }, { 1, 3 } } ), ( Matrix{ { 2, 0 }, { 3, 12 } } ) );
    EXPECT_EQ( hadamard( a, Matrix::ones( 2, 2 ) ), a );
    EXPECT_EQ( hadamard( a, Matrix::zeros( 2, 2 ) ), Matrix::zeros( 2, 2 ) );
    EXPECT_THROW( hadamard( a, Matrix::ones( 2, 3 ) ), shape_error );
}

TEST( Matrix, ProductsMatchNaive )
{
    auto  a = gaussian( 7, 5, 1 );
    auto  b = gaussian( 5, 4, 2 );
    auto  c = gaussian( 7, 4, 3 );

    EXPECT_LT( std::sqrt( naive_frob2( sub( a * b, naive_mul( a, b ) ) ) ), 1e-13 );
    EXPECT_LT( std::sqrt( naive_frob2( sub( transpose_times( a, c ), naive_mul( naive_transpose( a ), c ) ) ) ), 1e-13 );
    EXPECT_LT( std::sqrt( naive_frob2( sub( times_transpose( b, gaussian( 3, 4, 4 ) ),
                                            naive_mul( b, naive_transpose( gaussian( 3, 4, 4 ) ) ) ) ) ), 1e-13 );
    EXPECT_THROW( a * c, shape_error );
}

TEST( FrobeniusNorm, Basics )
{
    EXPECT_EQ( frobenius_norm( Matrix::zeros( 3, 3 ) ), 0.0 );
    EXPECT_DOUBLE_EQ( frobenius_norm( Matrix{ { 3, 4 } } ), 5.0 );
    EXPECT_DOUBLE_EQ( frobenius_norm( Matrix{ { 1e200, 1e200 } } ), std::sqrt( 2.0 ) * 1e200 );
}

TEST( FrobeniusNorm, MatchesSingularValues )
{
    auto          a = gaussian( 5, 4, 11 );
    auto          s = singular_values( a );
    const double  ss = std::sqrt( std::inner_product( s.begin(), s.end(), s.begin(), 0.0 ) );
    EXPECT_NEAR( frobenius_norm( a ), ss, 1e-10 );
}

TEST( Svd, DiagonalInput )
{
    auto  f = svd( Matrix{ { 3, 0, 0 }, { 0, 2, 0 }, { 0, 0, 1 } } );
    ASSERT_EQ( f.sigma.size(), 3u );
    EXPECT_NEAR( f.sigma[0], 3.0, 1e-15 );
    EXPECT_NEAR( f.sigma[1], 2.0, 1e-15 );
    EXPECT_NEAR( f.sigma[2], 1.0, 1e-15 );
}

TEST( Svd, ZeroMatrixHasOrthonormalFactors )
{
    auto  f = svd( Matrix::zeros( 3, 3 ) );
    for ( auto  s : f.sigma )
        EXPECT_EQ( s, 0.0 );
    EXPECT_LT( orthonormality_error( f.u ), 1e-12 );
    EXPECT_LT( orthonormality_error( f.v ), 1e-12 );
}

TEST( Svd, RandomShapesSatisfyContracts )
{
    const std::pair< idx_t, idx_t >  shapes[] = { { 6, 4 }, { 4, 6 }, { 1, 5 }, { 5, 1 }, { 12, 12 }, { 30, 17 } };
    std::uint64_t                    seed     = 100;

    for ( auto [ m, n ] : shapes )
    {
        auto  a = gaussian( m, n, seed++ );
        auto  f = svd( a );

        EXPECT_EQ( f.u.rows(), m );
        EXPECT_EQ( f.v.rows(), n );
        EXPECT_TRUE( std::is_sorted( f.sigma.rbegin(), f.sigma.rend() ) );
        EXPECT_LT( orthonormality_error( f.u ), 1e-10 );
        EXPECT_LT( orthonormality_error( f.v ), 1e-10 );
        EXPECT_LT( std::sqrt( naive_frob2( sub( f.reconstruct(), a ) ) ) / frobenius_norm( a ), 1e-10 ) << m << "x" << n;

        // sign convention: largest-magnitude entry of each u column is non-negative
        for ( idx_t j = 0; j < f.u.cols(); ++j )
        {
            idx_t  imax = 0;
            for ( idx_t i = 1; i < f.u.rows(); ++i )
                if ( std::abs( f.u( i, j ) ) > std::abs( f.u( imax, j ) ) )
                    imax = i;
            EXPECT_GE( f.u( imax, j ), 0.0 );
        }
    }
}

TEST( Svd, RankDeficientInputKeepsOrthonormalBasis )
{
    Rng   rng( 7 );
    auto  a = random_rank( 9, 6, 2, rng );
    auto  f = svd( a );

    EXPECT_EQ( numerical_rank( f.sigma ), 2u );
    EXPECT_LT( orthonormality_error( f.u ), 1e-10 );
    EXPECT_LT( orthonormality_error( f.v ), 1e-10 );
    EXPECT_LE( frobenius_norm( f.reconstruct() - a ), 1e-8 * std::max( 1.0, frobenius_norm( a ) ) );
}

TEST( Svd, Deterministic )
{
    auto  a = gaussian( 8, 5, 9 );
    auto  f = svd( a );
    auto  g = svd( a );
    EXPECT_EQ( f.u, g.u );
    EXPECT_EQ( f.v, g.v );
    EXPECT_EQ( f.sigma, g.sigma );
}

TEST( Svd, ReconstructionProperty )
{
    // scale-varied random inputs, including tiny and huge magnitudes
    Rng  rng( 2024 );
    for ( int t = 0; t < 60; ++t )
    {
        const idx_t   m     = 1 + idx_t( rng.uniform() * 15 );
        const idx_t   n     = 1 + idx_t( rng.uniform() * 15 );
        const double  scale = std::pow( 10.0, rng.uniform( -6, 6 ) );
        auto          a     = random_normal( m, n, rng ) * scale;
        auto          f     = svd( a );
        EXPECT_LE( frobenius_norm( f.reconstruct() - a ), 1e-8 * std::max( 1.0, frobenius_norm( a ) ) );
    }
}

TEST( HardThreshold, NoTruncationWhenRankCovered )
{
    Rng   rng( 3 );
    auto  a = random_rank( 7, 5, 3, rng );
    EXPECT_LT( frobenius_norm( hard_threshold( a, 3 ) - a ), 1e-10 * frobenius_norm( a ) );
    EXPECT_LT( frobenius_norm( hard_threshold( a, 5 ) - a ), 1e-10 * frobenius_norm( a ) );
}

TEST( HardThreshold, DiagonalCase )
{
    auto  h = hard_threshold( Matrix{ { 3, 0, 0 }, { 0, 2, 0 }, { 0, 0, 1 } }, 2 );
    EXPECT_LT( frobenius_norm( h - Matrix{ { 3, 0, 0 }, { 0, 2, 0 }, { 0, 0, 0 } } ), 1e-14 );
}

TEST( HardThreshold, RankOutOfRange )
{
    EXPECT_THROW( hard_threshold( Matrix::ones( 3, 2 ), 3 ), validation_error );
    EXPECT_EQ( hard_threshold( Matrix::ones( 3, 2 ), 0 ), Matrix::zeros( 3, 2 ) );
}

TEST( HardThreshold, TieIsFlaggedNonUnique )
{
    auto  t = hard_threshold_flagged( Matrix{ { 2, 0, 0 }, { 0, 2, 0 }, { 0, 0, 1 } }, 1 );
    EXPECT_TRUE( t.non_unique );
    EXPECT_NEAR( frobenius_norm( t.approx ), 2.0, 1e-14 );
    EXPECT_FALSE( hard_threshold_flagged( Matrix{ { 2, 0, 0 }, { 0, 2, 0 }, { 0, 0, 1 } }, 2 ).non_unique );
}

TEST( HardThreshold, EckartYoungOracle )
{
    Rng           rng( 42 );
    auto          a    = random_normal( 8, 6, rng );
    auto          h    = hard_threshold( a, 3 );
    const double  best = frobenius_norm( a - h );

    EXPECT_EQ( numerical_rank( h ), 3u );

    // tail identity
    auto  s = singular_values( a );
    EXPECT_NEAR( best * best, tail_energy( s, 3 ), 1e-8 * tail_energy( s, 3 ) );

    // random rank-3 candidates: raw products and least-squares-fitted ones
    for ( int t = 0; t < 1000; ++t )
    {
        auto  l = random_normal( 8, 3, rng );
        auto  y = ( t % 2 == 0 ) ? naive_mul( l, random_normal( 3, 6, rng ) )
                                 : naive_mul( gs_projector( l ), a );
        ASSERT_LE( best, frobenius_norm( a - y ) + 1e-12 );
    }
}

TEST( HardThreshold, TailIdentityProperty )
{
    Rng  rng( 77 );
    for ( int t = 0; t < 40; ++t )
    {
        const idx_t  m = 2 + idx_t( rng.uniform() * 10 );
        const idx_t  n = 2 + idx_t( rng.uniform() * 10 );
        const idx_t  r = idx_t( rng.uniform() * ( std::min( m, n ) + 1 ) );
        auto         a = random_normal( m, n, rng );
        auto         s = singular_values( a );
        const double e = frobenius_norm_squared( a - hard_threshold( a, r ) );
        EXPECT_NEAR( e, tail_energy( s, r ), 1e-8 * std::max( 1.0, tail_energy( s, 0 ) ) );
    }
}

TEST( Projection, Basics )
{
    Matrix  e1{ { 1 }, { 0 }, { 0 } };
    Matrix  e2{ { 0 }, { 1 }, { 0 } };

    EXPECT_LT( frobenius_norm( project_onto_colspace( e1, Matrix{ { 2 }, { 0 }, { 0 } } ) - Matrix{ { 2 }, { 0 }, { 0 } } ), 1e-15 );
    EXPECT_LT( frobenius_norm( project_onto_complement( e1, e2 ) - e2 ), 1e-15 );
    EXPECT_LT( frobenius_norm( project_onto_complement( e1, e1 * 3.0 ) ), 1e-15 );

    auto  b = gaussian( 6, 2, 5 );
    EXPECT_LT( frobenius_norm( project_onto_colspace( b, b ) - b ), 1e-12 * frobenius_norm( b ) );
}

TEST( Projection, DecompositionAndIdempotence )
{
    Rng  rng( 8 );
    for ( int t = 0; t < 20; ++t )
    {
        auto  b  = random_normal( 6, 2, rng );
        auto  x  = random_normal( 6, 3, rng );
        auto  p  = project_onto_colspace( b, x );
        auto  pc = project_onto_complement( b, x );

        EXPECT_LT( frobenius_norm( p + pc - x ), 1e-10 * frobenius_norm( x ) );
        EXPECT_LT( frobenius_norm( project_onto_colspace( b, p ) - p ), 1e-10 * frobenius_norm( x ) );
        EXPECT_LT( frobenius_norm( transpose_times( b, pc ) ), 1e-10 * frobenius_norm( x ) * frobenius_norm( b ) );
        // agrees with an independently built projector
        EXPECT_LT( frobenius_norm( p - naive_mul( gs_projector( b ), x ) ), 1e-10 * frobenius_norm( x ) );
    }
}

TEST( Projection, RankDeficientBasisRejected )
{
    Matrix  b{ { 1, 2 }, { 2, 4 }, { 3, 6 } };
    EXPECT_THROW( project_onto_colspace( b, Matrix::ones( 3, 1 ) ), rank_deficient_error );
    EXPECT_THROW( project_onto_complement( b, Matrix::ones( 3, 1 ) ), rank_deficient_error );
    EXPECT_THROW( project_onto_colspace( Matrix::ones( 3, 1 ), Matrix::ones( 2, 1 ) ), shape_error );
}

TEST( CanonicalAngles, Basics )
{
    Matrix  e1{ { 1 }, { 0 }, { 0 } };
    Matrix  e2{ { 0 }, { 1 }, { 0 } };

    auto  same = canonical_angle_sines( gaussian( 5, 2, 1 ), gaussian( 5, 2, 1 ) * 3.0 );
    for ( auto  s : same )
        EXPECT_LT( s, 1e-12 );

    auto  orth = canonical_angle_sines( e1, e2 );
    ASSERT_EQ( orth.size(), 1u );
    EXPECT_NEAR( orth[0], 1.0, 1e-15 );

    EXPECT_THROW( canonical_angle_sines( gaussian( 5, 2, 1 ), gaussian( 5, 3, 1 ) ), shape_error );
    EXPECT_THROW( canonical_angle_sines( Matrix{ { 1, 2 }, { 2, 4 }, { 3, 6 } }, gaussian( 3, 2, 1 ) ), rank_deficient_error );
}

TEST( CanonicalAngles, SqrtTwoIdentity )
{
    Rng  rng( 31 );
    for ( int t = 0; t < 50; ++t )
    {
        auto          b   = random_normal( 7, 3, rng );
        auto          bt  = b + random_normal( 7, 3, rng ) * std::pow( 10.0, rng.uniform( -4, 0 ) );
        auto          s   = canonical_angle_sines( b, bt );
        const double  lhs = std::sqrt( naive_frob2( sub( gs_projector( b ), gs_projector( bt ) ) ) );
        const double  rhs = std::sqrt( 2.0 ) * std::sqrt( std::inner_product( s.begin(), s.end(), s.begin(), 0.0 ) );

        EXPECT_TRUE( std::is_sorted( s.rbegin(), s.rend() ) );
        EXPECT_NEAR( lhs, rhs, 1e-8 );
    }
}

TEST( ProjectionPerturbation, LemmaHoldsVerbatim )
{
    // ‖P_B − P_B̃‖_F ≤ 2‖B − B̃‖_F / σ_min(B̃)
    Rng  rng( 99 );
    for ( int t = 0; t < 200; ++t )
    {
        const idx_t   m   = 3 + idx_t( rng.uniform() * 8 );
        const idx_t   k   = 1 + idx_t( rng.uniform() * ( m - 1 ) );
        auto          b   = random_normal( m, k, rng );
        auto          e   = random_normal( m, k, rng );
        const double  mag = std::pow( 10.0, rng.uniform( -6, -1 ) );
        e *= mag / frobenius_norm( e );
        auto          bt  = b + e;
        const double  eta = singular_values( bt ).back();
        const double  lhs = frobenius_norm( projector( b ) - projector( bt ) );

        ASSERT_LE( lhs, 2.0 * frobenius_norm( b - bt ) / eta ) << "trial " << t;
    }
}

TEST( Qr, IdentityAndOrthonormalInput )
{
    auto  f = qr( Matrix::identity( 4 ) );
    EXPECT_LT( frobenius_norm( f.q - Matrix::identity( 4 ) ), 1e-15 );
    EXPECT_LT( frobenius_norm( f.r - Matrix::identity( 4 ) ), 1e-15 );

    auto  q0 = gram_schmidt( gaussian( 6, 3, 4 ) );
    auto  g  = qr( q0 );
    for ( idx_t i = 0; i < 3; ++i )
    {
        EXPECT_NEAR( std::abs( g.r( i, i ) ), 1.0, 1e-12 );
        for ( idx_t j = i + 1; j < 3; ++j )
            EXPECT_NEAR( g.r( i, j ), 0.0, 1e-12 );
    }
}

TEST( Qr, Reconstruction )
{
    for ( auto [ m, n ] : { std::pair< idx_t, idx_t >{ 7, 3 }, { 3, 7 }, { 5, 5 } } )
    {
        auto  a = gaussian( m, n, m * 10 + n );
        auto  f = qr( a );
        EXPECT_LT( orthonormality_error( f.q ), 1e-10 );
        EXPECT_LT( frobenius_norm( f.q * f.r - a ) / frobenius_norm( a ), 1e-10 );
        for ( idx_t i = 0; i < f.r.rows(); ++i )
            for ( idx_t j = 0; j < std::min( i, f.r.cols() ); ++j )
                EXPECT_EQ( f.r( i, j ), 0.0 );
    }
}

TEST( MatrixText, RoundTripIsExact )
{
    Rng  rng( 5 );
    for ( int t = 0; t < 10; ++t )
    {
        auto  a = random_normal( 1 + t, 1 + ( t * 3 ) % 7, rng ) * std::pow( 10.0, rng.uniform( -30, 30 ) );
        EXPECT_EQ( from_text( to_text( a ) ), a );

        std::stringstream  csv;
        write_matrix_csv( csv, a );
        EXPECT_EQ( read_matrix_csv( csv ), a );
    }
}

TEST( MatrixText, Format )
{
    EXPECT_EQ( to_text( Matrix{ { 1, 0.5 }, { -2, 3 } } ), "2 2\n1 0.5\n-2 3\n" );
    EXPECT_EQ( to_text( Matrix{ { 0.1 } } ), "1 1\n0.10000000000000001\n" );
}

TEST( MatrixText, MalformedInput )
{
    EXPECT_THROW( from_text( "" ), io_error );
    EXPECT_THROW( from_text( "2 2\n1 2\n" ), io_error );
    EXPECT_THROW( from_text( "1 2\n1 2 3\n" ), io_error );
    EXPECT_THROW( from_text( "1 2\n1 x\n" ), io_error );
    EXPECT_THROW( from_text( "1 1\nnan\n" ), io_error );
    EXPECT_THROW( from_text( "1 1\n1\n2\n" ), io_error );
    EXPECT_EQ( from_text( "1 2\r\n1 2\r\n" ), ( Matrix{ { 1, 2 } } ) );
}

TEST( Svd, LowRankInputsOfEveryShapeConverge )
{
    Rng  rng( 123 );
    for ( int t = 0; t < 300; ++t )
    {
        const idx_t  m = 1 + idx_t( rng.uniform() * 12 );
        const idx_t  n = 1 + idx_t( rng.uniform() * 12 );
        const idx_t  r = idx_t( rng.uniform() * double( std::min( m, n ) + 1 ) );
        auto         a = random_rank( m, n, r, rng );

        SvdFactors  f;
        ASSERT_NO_THROW( f = svd( a ) ) << m << "x" << n << " rank " << r;
        EXPECT_LT( std::sqrt( naive_frob2( sub( f.reconstruct(), a ) ) ), 1e-12 * std::max( 1.0, frobenius_norm( a ) ) );
        EXPECT_LT( orthonormality_error( f.u ), 1e-10 );
        EXPECT_LT( orthonormality_error( f.v ), 1e-10 );
        EXPECT_LE( numerical_rank( f.sigma ), r );
    }
}
