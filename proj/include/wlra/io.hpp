#pragma once
//
// Module      : wlra/io
// Description : matrix text format, comma-separated form and atomic file output
//
// Text format: first line "rows cols", then <rows> lines of <cols>
// space-separated decimal floats; written with 17 significant digits
// so that a write/read cycle reproduces every double exactly.
//

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wlra/matrix.hpp"

namespace wlra {

// 17 significant digits, enough to round-trip any double
inline
std::string
format_double ( double x )
{
    char  buf[32];
    std::snprintf( buf, sizeof( buf ), "%.17g", x );
    return buf;
}

namespace detail {

inline
std::vector< std::string_view >
split_tokens ( std::string_view line, char sep )
{
    std::vector< std::string_view >  tok;

    if ( sep == ' ' )
    {
        idx_t  i = 0;
        while ( i < line.size() )
        {
            while ( i < line.size() && ( line[i] == ' ' || line[i] == '\t' ) ) ++i;
            idx_t  j = i;
            while ( j < line.size() && line[j] != ' ' && line[j] != '\t' ) ++j;
            if ( j > i )
                tok.push_back( line.substr( i, j - i ) );
            i = j;
        }
    }
    else
    {
        idx_t  start = 0;
        for ( idx_t  i = 0; i <= line.size(); ++i )
        {
            if ( i == line.size() || line[i] == sep )
            {
                auto  t = line.substr( start, i - start );
                while ( ! t.empty() && ( t.front() == ' ' || t.front() == '\t' ) ) t.remove_prefix( 1 );
                while ( ! t.empty() && ( t.back()  == ' ' || t.back()  == '\t' ) ) t.remove_suffix( 1 );
                tok.push_back( t );
                start = i + 1;
            }
        }
    }

    return tok;
}

inline
double
parse_double ( std::string_view tok, idx_t line_no )
{
    double  value = 0.0;
    if ( ! tok.empty() && tok.front() == '+' )
        tok.remove_prefix( 1 );
    auto [ ptr, ec ] = std::from_chars( tok.data(), tok.data() + tok.size(), value );
    if ( ec != std::errc() || ptr != tok.data() + tok.size() )
        throw io_error( "line " + std::to_string( line_no ) + ": not a number: '" + std::string( tok ) + "'" );
    if ( ! std::isfinite( value ) )
        throw io_error( "line " + std::to_string( line_no ) + ": non-finite entry '" + std::string( tok ) + "'" );
    return value;
}

inline
idx_t
parse_dim ( std::string_view tok )
{
    idx_t  value = 0;
    auto [ ptr, ec ] = std::from_chars( tok.data(), tok.data() + tok.size(), value );
    if ( ec != std::errc() || ptr != tok.data() + tok.size() )
        throw io_error( "header: bad dimension '" + std::string( tok ) + "'" );
    return value;
}

inline
bool
next_line ( std::istream &  in, std::string &  line )
{
    if ( ! std::getline( in, line ) )
        return false;
    if ( ! line.empty() && line.back() == '\r' )
        line.pop_back();
    return true;
}

} // namespace detail

inline
Matrix
read_matrix_text ( std::istream &  in )
{
    std::string  line;
    if ( ! detail::next_line( in, line ) )
        throw io_error( "matrix text: missing header line" );

    auto  hdr = detail::split_tokens( line, ' ' );
    if ( hdr.size() != 2 )
        throw io_error( "matrix text: header must be 'rows cols'" );

    const idx_t            rows = detail::parse_dim( hdr[0] );
    const idx_t            cols = detail::parse_dim( hdr[1] );
    std::vector< double >  data;
    data.reserve( rows * cols );

    for ( idx_t  i = 0; i < rows; ++i )
    {
        if ( ! detail::next_line( in, line ) )
            throw io_error( "matrix text: expected " + std::to_string( rows ) + " rows, got " + std::to_string( i ) );
        auto  tok = detail::split_tokens( line, ' ' );
        if ( tok.size() != cols )
            throw io_error( "line " + std::to_string( i + 2 ) + ": expected " + std::to_string( cols ) +
                            " entries, got " + std::to_string( tok.size() ) );
        for ( auto  t : tok )
            data.push_back( detail::parse_double( t, i + 2 ) );
    }

    while ( detail::next_line( in, line ) )
        if ( ! detail::split_tokens( line, ' ' ).empty() )
            throw io_error( "matrix text: trailing content after " + std::to_string( rows ) + " rows" );

    return Matrix( rows, cols, std::move( data ) );
}

inline
void
write_matrix_text ( std::ostream &  out, Matrix const &  a )
{
    out << a.rows() << ' ' << a.cols() << '\n';
    for ( idx_t  i = 0; i < a.rows(); ++i )
    {
        for ( idx_t  j = 0; j < a.cols(); ++j )
        {
            if ( j > 0 ) out << ' ';
            out << format_double( a( i, j ) );
        }
        out << '\n';
    }
}

// comma-separated rows, no header; shape inferred
inline
Matrix
read_matrix_csv ( std::istream &  in )
{
    std::string            line;
    std::vector< double >  data;
    idx_t                  rows = 0;
    idx_t                  cols = 0;

    while ( detail::next_line( in, line ) )
    {
        if ( line.find_first_not_of( " \t" ) == std::string::npos )
            continue;
        auto  tok = detail::split_tokens( line, ',' );
        if ( rows == 0 )
            cols = tok.size();
        else if ( tok.size() != cols )
            throw io_error( "csv line " + std::to_string( rows + 1 ) + ": expected " + std::to_string( cols ) +
                            " fields, got " + std::to_string( tok.size() ) );
        for ( auto  t : tok )
            data.push_back( detail::parse_double( t, rows + 1 ) );
        ++rows;
    }

    return Matrix( rows, cols, std::move( data ) );
}

inline
void
write_matrix_csv ( std::ostream &  out, Matrix const &  a )
{
    for ( idx_t  i = 0; i < a.rows(); ++i )
    {
        for ( idx_t  j = 0; j < a.cols(); ++j )
        {
            if ( j > 0 ) out << ',';
            out << format_double( a( i, j ) );
        }
        out << '\n';
    }
}

inline
std::string
to_text ( Matrix const &  a )
{
    std::ostringstream  os;
    write_matrix_text( os, a );
    return os.str();
}

inline
Matrix
from_text ( std::string const &  s )
{
    std::istringstream  is( s );
    return read_matrix_text( is );
}

inline
Matrix
load_matrix ( std::filesystem::path const &  path )
{
    std::ifstream  in( path, std::ios::binary );
    if ( ! in )
        throw io_error( "cannot open '" + path.string() + "'" );
    try
    {
        return path.extension() == ".csv" ? read_matrix_csv( in ) : read_matrix_text( in );
    }
    catch ( io_error const &  e )
    {
        throw io_error( path.string() + ": " + e.what() );
    }
}

//
// Writes <content> to a sibling temporary and renames it over <path>, so a
// failed write never leaves a partial file behind.
//
inline
void
write_file_atomic ( std::filesystem::path const &  path, std::string const &  content )
{
    auto  tmp = path;
    tmp += ".tmp";

    {
        std::ofstream  out( tmp, std::ios::binary | std::ios::trunc );
        if ( ! out )
            throw io_error( "cannot open '" + tmp.string() + "' for writing" );
        out << content;
        out.flush();
        if ( ! out )
        {
            out.close();
            std::error_code  ec;
            std::filesystem::remove( tmp, ec );
            throw io_error( "write to '" + tmp.string() + "' failed" );
        }
    }

    std::error_code  ec;
    std::filesystem::rename( tmp, path, ec );
    if ( ec )
    {
        std::filesystem::remove( tmp, ec );
        throw io_error( "cannot rename onto '" + path.string() + "'" );
    }
}

inline
void
save_matrix ( std::filesystem::path const &  path, Matrix const &  a )
{
    std::ostringstream  os;
    if ( path.extension() == ".csv" )
        write_matrix_csv( os, a );
    else
        write_matrix_text( os, a );
    write_file_atomic( path, os.str() );
}

} // namespace wlra
