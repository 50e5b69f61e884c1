#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "test_util.hpp"

using namespace wlra;
using namespace wlra::test;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int          code = -1;
    std::string  out;
    std::string  err;
};

Run invoke ( std::vector< std::string > const &  args )
{
    std::ostringstream  out, err;
    Run                 r;
    r.code = wlra::cli::run( args, out, err );
    r.out  = out.str();
    r.err  = err.str();
    return r;
}

std::string slurp ( fs::path const &  p )
{
    std::ifstream       in( p, std::ios::binary );
    std::ostringstream  ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test
{
protected:
    fs::path  dir;

    void SetUp () override
    {
        dir = fs::temp_directory_path() / ( "wlra_cli_" + std::to_string( ::getpid() ) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name() );
        fs::remove_all( dir );
        fs::create_directories( dir );
    }
    void TearDown () override { fs::remove_all( dir ); }

    std::string path ( std::string const &  name ) const { return ( dir / name ).string(); }

    std::string put ( std::string const &  name, Matrix const &  a ) const
    {
        save_matrix( path( name ), a );
        return path( name );
    }
};

} // namespace

TEST_F( Cli, HelpMatchesGolden )
{
    auto  top = invoke( { "--help" } );
    EXPECT_EQ( top.code, 0 );
    EXPECT_EQ( top.out, slurp( fs::path( WLRA_GOLDEN_DIR ) / "help.txt" ) );

    auto  wlr = invoke( { "wlr", "--help" } );
    EXPECT_EQ( wlr.code, 0 );
    EXPECT_EQ( wlr.out, slurp( fs::path( WLRA_GOLDEN_DIR ) / "help_wlr.txt" ) );
}

TEST_F( Cli, GhsIdentityRoundTrip )
{
    auto  in  = put( "id.txt", Matrix::identity( 3 ) );
    auto  res = invoke( { "ghs", "-i", in, "-o", path( "out.txt" ), "-k", "1", "-r", "3" } );
    ASSERT_EQ( res.code, 0 ) << res.err;
    EXPECT_EQ( slurp( path( "out.txt" ) ), slurp( in ) );
    EXPECT_NE( res.out.find( "unique true" ), std::string::npos );
}

TEST_F( Cli, GhsRankBelowKIsValidationError )
{
    auto  in = put( "a.txt", gaussian( 5, 4, 1 ) );
    auto  res = invoke( { "ghs", "-i", in, "-o", path( "out.txt" ), "-k", "2", "-r", "1" } );
    EXPECT_EQ( res.code, 2 );
    EXPECT_NE( res.err.find( "r >= k" ), std::string::npos );
    EXPECT_EQ( std::count( res.err.begin(), res.err.end(), '\n' ), 1 );
    EXPECT_FALSE( fs::exists( path( "out.txt" ) ) );
}

TEST_F( Cli, GhsObjectiveMatchesProjectedTail )
{
    auto  a  = gen_conditioned( { 50, 50, conditioned_spectrum( 5.004e3 ), 3 } );
    auto  in = put( "a.txt", a );
    auto  res = invoke( { "ghs", "-i", in, "-o", path( "x.txt" ), "-k", "5", "-r", "15" } );
    ASSERT_EQ( res.code, 0 ) << res.err;

    auto  [ a1, a2 ] = split_columns( a, 5 );
    auto  pc = sub( a2, naive_mul( gs_projector( a1 ), a2 ) );
    auto  s  = singular_values( pc );
    double  tail = 0;
    for ( std::size_t i = 10; i < s.size(); ++i ) tail += s[i] * s[i];

    std::istringstream  is( res.out );
    std::string         key;
    double              objective = -1;
    is >> key >> objective;
    ASSERT_EQ( key, "objective" );
    EXPECT_NEAR( objective, tail, 1e-8 * tail );
}

TEST_F( Cli, GhsPenalizedAndUniformSvd )
{
    auto  a  = gaussian( 8, 6, 2 );
    auto  in = put( "a.txt", a );

    auto  pen = invoke( { "ghs-penalized", "-i", in, "-o", path( "p.txt" ), "-k", "2", "--tau", "1e9" } );
    ASSERT_EQ( pen.code, 0 ) << pen.err;
    EXPECT_NE( pen.out.find( "r_star 0" ), std::string::npos );
    EXPECT_EQ( invoke( { "ghs-penalized", "-i", in, "-o", path( "p.txt" ), "-k", "2", "--tau", "-1" } ).code, 2 );

    auto  us = invoke( { "uniform-svd", "-i", in, "-o", path( "u.txt" ), "-k", "2", "-r", "3", "--lambda", "1" } );
    ASSERT_EQ( us.code, 0 ) << us.err;
    EXPECT_LT( frobenius_norm( load_matrix( path( "u.txt" ) ) - hard_threshold( a, 3 ) ), 1e-12 );
}

TEST_F( Cli, WlrEchoesCriteriaAndIsDeterministic )
{
    auto  a  = gaussian( 12, 10, 4 );
    auto  in = put( "a.txt", a );
    Rng   rng( 5 );
    auto  w  = put( "w.txt", random_uniform( 12, 3, 1, 10, rng ) );

    std::vector< std::string >  args{ "wlr", "-i", in, "-o", path( "x1.txt" ), "-k", "3", "-r", "5", "--weights", w,
                                      "--epsilon", "1e-16", "--max-iter", "2500", "--seed", "9" };
    auto  r1 = invoke( args );
    ASSERT_EQ( r1.code, 0 ) << r1.err;
    EXPECT_EQ( r1.out.rfind( "# wlr epsilon=1e-16 max_iter=2500 seed=9 k=3 r=5\n", 0 ), 0u ) << r1.out;

    args[4] = path( "x2.txt" );
    auto  r2 = invoke( args );
    EXPECT_EQ( r1.out, r2.out );
    EXPECT_EQ( slurp( path( "x1.txt" ) ), slurp( path( "x2.txt" ) ) );
    EXPECT_LE( numerical_rank( load_matrix( path( "x1.txt" ) ) ), 5u );
}

TEST_F( Cli, WlrDiagnosticsTrace )
{
    auto  in  = put( "a.txt", gaussian( 9, 7, 6 ) );
    auto  res = invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "2", "-r", "3", "--lambda", "20", "--max-iter", "15",
                       "--diagnostics" } );
    ASSERT_EQ( res.code, 0 ) << res.err;
    auto  trace = slurp( path( "x.txt.trace.csv" ) );
    EXPECT_EQ( trace.rfind( "p,m_p,error_p,d1,d2,d3,d4,grad_x1,grad_c,grad_b,grad_d\n", 0 ), 0u );
    EXPECT_EQ( std::count( trace.begin(), trace.end(), '\n' ), 16 );

    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "y.txt" ), "-k", "2", "-r", "3", "--lambda", "20", "--trace", path( "t.csv" ) } ).code, 2 );
}

TEST_F( Cli, WlrInputErrors )
{
    auto  in = put( "a.txt", gaussian( 6, 5, 7 ) );
    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "2", "-r", "3", "--weights", path( "missing.txt" ) } ).code, 1 );
    EXPECT_EQ( invoke( { "wlr", "-i", path( "missing.txt" ), "-o", path( "x.txt" ), "-k", "2", "-r", "3", "--lambda", "1" } ).code, 1 );
    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "2", "-r", "3" } ).code, 2 );
    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "2", "-r", "3", "--lambda", "0" } ).code, 2 );
    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "2", "-r", "3", "--lambda", "1", "--epsilon", "0" } ).code, 2 );
    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "9", "-r", "3", "--lambda", "1" } ).code, 2 );
    EXPECT_EQ( invoke( { "wlr", "-i", in, "-o", path( "x.txt" ), "-k", "2", "-r", "3", "--lambda", "1", "--bogus" } ).code, 2 );
    EXPECT_EQ( invoke( {} ).code, 2 );

    std::ofstream( path( "bad.txt" ) ) << "2 2\n1 2\n3\n";
    EXPECT_EQ( invoke( { "als", "-i", path( "bad.txt" ), "-o", path( "x.txt" ), "-r", "1" } ).code, 1 );
    EXPECT_FALSE( fs::exists( path( "x.txt" ) ) );
}

TEST_F( Cli, FailureLeavesExistingOutputUntouched )
{
    auto  in = put( "a.txt", gaussian( 5, 4, 8 ) );
    std::ofstream( path( "out.txt" ) ) << "keep";
    EXPECT_EQ( invoke( { "ghs", "-i", in, "-o", path( "out.txt" ), "-k", "3", "-r", "2" } ).code, 2 );
    EXPECT_EQ( slurp( path( "out.txt" ) ), "keep" );
}

TEST_F( Cli, EmAndAls )
{
    Rng   rng( 9 );
    auto  a  = random_rank( 10, 8, 2, rng ) + random_normal( 10, 8, rng ) * 0.01;
    auto  in = put( "a.txt", a );

    auto  em = invoke( { "em", "-i", in, "-o", path( "e.txt" ), "-k", "2", "-r", "2", "--lambda", "1" } );
    ASSERT_EQ( em.code, 0 ) << em.err;
    EXPECT_LT( frobenius_norm( load_matrix( path( "e.txt" ) ) - hard_threshold( a, 2 ) ), 1e-8 );

    auto  als = invoke( { "als", "-i", in, "-o", path( "l.txt" ), "-r", "2" } );
    ASSERT_EQ( als.code, 0 ) << als.err;
    EXPECT_LT( frobenius_norm( load_matrix( path( "l.txt" ) ) - hard_threshold( a, 2 ) ), 1e-6 );
    EXPECT_EQ( invoke( { "als", "-i", in, "-o", path( "l.txt" ), "-r", "9" } ).code, 2 );
}

TEST_F( Cli, BenchSweepParsesRangeSyntax )
{
    auto  res = invoke( { "bench", "sweep-lambda", "--m", "20", "--n", "16", "--true-rank", "5", "-k", "3", "-r", "5",
                       "--lambdas", "1:50:1000", "--trials", "1", "--max-iter", "200" } );
    ASSERT_EQ( res.code, 0 ) << res.err;
    EXPECT_EQ( std::count( res.out.begin(), res.out.end(), '\n' ), 21 );

    EXPECT_EQ( invoke( { "bench", "sweep-lambda", "-k", "3", "-r", "5", "--lambdas", "" } ).code, 2 );
    EXPECT_EQ( invoke( { "bench", "sweep-lambda", "-k", "3", "-r", "5", "--lambdas", "5:1:1" } ).code, 2 );
    EXPECT_EQ( invoke( { "bench", "sweep-lambda", "-k", "3", "-r", "5", "--lambdas", "1", "--mode", "odd" } ).code, 2 );
}

TEST_F( Cli, BenchCompareGridAndDeterminism )
{
    std::vector< std::string >  args{ "bench", "compare", "--w-lo", "50", "--w-hi", "1000", "--k", "10", "--r", "20:1:30",
                                      "--em-max-iter", "3", "--max-iter", "20", "-o", path( "c1.csv" ) };
    auto  r1 = invoke( args );
    ASSERT_EQ( r1.code, 0 ) << r1.err;
    args.back() = path( "c2.csv" );
    ASSERT_EQ( invoke( args ).code, 0 );

    auto  csv = slurp( path( "c1.csv" ) );
    EXPECT_EQ( csv, slurp( path( "c2.csv" ) ) );
    // 11 ranks × 3 solvers × 2 metrics + header
    EXPECT_EQ( std::count( csv.begin(), csv.end(), '\n' ), 67 );
    EXPECT_NE( csv.find( "compare,30,wlr,rmse_vs_ag," ), std::string::npos );

    EXPECT_EQ( invoke( { "bench", "compare", "--k", "10", "--r", "5" } ).code, 2 );
}

TEST_F( Cli, BenchTrace )
{
    auto  res = invoke( { "bench", "trace", "--m", "20", "--n", "18", "--true-rank", "6", "-k", "3", "-r", "6", "--lambda", "50",
                       "--start-closed-form", "--epsilon", "1e-7" } );
    ASSERT_EQ( res.code, 0 ) << res.err;
    EXPECT_NE( res.out.find( "trace,1,wlr,relative_dist_to_xsvd," ), std::string::npos );
    EXPECT_EQ( res.out.find( "trace,2," ), std::string::npos );

    auto  capped = invoke( { "bench", "trace", "--m", "12", "--n", "10", "-k", "2", "-r", "4", "--w-lo", "25", "--w-hi", "75",
                          "--epsilon", "2.2204e-16", "--max-iter", "5" } );
    ASSERT_EQ( capped.code, 0 ) << capped.err;
    EXPECT_NE( capped.out.find( "trace,5,wlr,relative_error," ), std::string::npos );
    EXPECT_EQ( capped.out.find( "relative_dist_to_xsvd" ), std::string::npos );
}

TEST_F( Cli, SelftestRoutesSuites )
{
    auto  res = invoke( { "selftest", "--suite", "descent", "--trials", "3" } );
    EXPECT_EQ( res.code, 0 );
    EXPECT_EQ( res.out.rfind( "PASS descent:", 0 ), 0u );
    EXPECT_EQ( std::count( res.out.begin(), res.out.end(), '\n' ), 1 );
    EXPECT_EQ( invoke( { "selftest", "--suite", "nope" } ).code, 2 );
}

TEST_F( Cli, ConvertRoundTrip )
{
    auto  a  = gaussian( 4, 3, 10 );
    auto  in = put( "a.txt", a );
    ASSERT_EQ( invoke( { "convert", "-i", in, "-o", path( "a.csv" ) } ).code, 0 );
    ASSERT_EQ( invoke( { "convert", "-i", path( "a.csv" ), "-o", path( "b.txt" ) } ).code, 0 );
    EXPECT_EQ( slurp( in ), slurp( path( "b.txt" ) ) );
    EXPECT_EQ( load_matrix( path( "a.csv" ) ), a );
}
