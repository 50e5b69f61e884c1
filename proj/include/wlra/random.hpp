#pragma once
//
// Module      : wlra/random
// Description : seeded random matrices
//
// Generator: std::mt19937_64, whose output sequence is fixed by the
// standard. Uniforms take the top 53 bits; normals use the Box-Muller
// transform (both outputs consumed). The distribution objects of <random>
// are implementation-defined and therefore not used.
//

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "wlra/matrix.hpp"

namespace wlra {

class Rng
{
public:
    explicit Rng ( std::uint64_t seed ) : _engine( seed ) {}

    // uniform on [0, 1)
    double uniform ()
    {
        return double( _engine() >> 11 ) * 0x1.0p-53;
    }

    double uniform ( double lo, double hi ) { return lo + ( hi - lo ) * uniform(); }

    double normal ()
    {
        if ( _has_spare )
        {
            _has_spare = false;
            return _spare;
        }

        double  u1 = 0.0;
        do { u1 = uniform(); } while ( u1 == 0.0 );
        const double  u2  = uniform();
        const double  rad = std::sqrt( -2.0 * std::log( u1 ) );
        const double  ang = 2.0 * std::numbers::pi * u2;

        _spare     = rad * std::sin( ang );
        _has_spare = true;
        return rad * std::cos( ang );
    }

private:
    std::mt19937_64  _engine;
    double           _spare     = 0.0;
    bool             _has_spare = false;
};

inline
Matrix
random_normal ( idx_t rows, idx_t cols, Rng &  rng )
{
    Matrix  a( rows, cols );
    for ( auto &  x : a.data() )
        x = rng.normal();
    return a;
}

inline
Matrix
random_uniform ( idx_t rows, idx_t cols, double lo, double hi, Rng &  rng )
{
    Matrix  a( rows, cols );
    for ( auto &  x : a.data() )
        x = rng.uniform( lo, hi );
    return a;
}

// derives an independent stream seed from a base seed and a fixed offset
inline
std::uint64_t
sub_seed ( std::uint64_t base, std::uint64_t offset )
{
    // splitmix64 finaliser
    std::uint64_t  z = base + 0x9E3779B97F4A7C15ull * ( offset + 1 );
    z = ( z ^ ( z >> 30 ) ) * 0xBF58476D1CE4E5B9ull;
    z = ( z ^ ( z >> 27 ) ) * 0x94D049BB133111EBull;
    return z ^ ( z >> 31 );
}

} // namespace wlra
