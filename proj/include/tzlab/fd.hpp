#ifndef TZLAB_FD_HPP
#define TZLAB_FD_HPP

#include <algorithm>

#include "tzlab/grid.hpp"

namespace tzlab {

// Second-order finite differences on grids: central in the interior,
// one-sided at the boundary. An output node is masked whenever any stencil
// input is masked.

template <class T>
Grid<T> fd_du(const Grid<T>& g) {
    const GridSpec& s = g.spec;
    const double d = s.du();
    Grid<T> out(s);
    for (int j = 0; j < s.nv; ++j) {
        for (int i = 0; i < s.nu; ++i) {
            if (i > 0 && i < s.nu - 1) {
                out.at(i, j) = (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * d);
                out.set_mask(i, j, g.ok(i - 1, j) && g.ok(i, j) && g.ok(i + 1, j));
            } else if (i == 0) {
                out.at(i, j) =
                    (-3.0 * g.at(0, j) + 4.0 * g.at(1, j) - g.at(2, j)) / (2.0 * d);
                out.set_mask(i, j, g.ok(0, j) && g.ok(1, j) && g.ok(2, j));
            } else {
                out.at(i, j) = (3.0 * g.at(i, j) - 4.0 * g.at(i - 1, j) +
                                g.at(i - 2, j)) / (2.0 * d);
                out.set_mask(i, j, g.ok(i, j) && g.ok(i - 1, j) && g.ok(i - 2, j));
            }
        }
    }
    return out;
}

template <class T>
Grid<T> fd_dv(const Grid<T>& g) {
    const GridSpec& s = g.spec;
    const double d = s.dv();
    Grid<T> out(s);
    for (int j = 0; j < s.nv; ++j) {
        for (int i = 0; i < s.nu; ++i) {
            if (j > 0 && j < s.nv - 1) {
                out.at(i, j) = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * d);
                out.set_mask(i, j, g.ok(i, j - 1) && g.ok(i, j) && g.ok(i, j + 1));
            } else if (j == 0) {
                out.at(i, j) =
                    (-3.0 * g.at(i, 0) + 4.0 * g.at(i, 1) - g.at(i, 2)) / (2.0 * d);
                out.set_mask(i, j, g.ok(i, 0) && g.ok(i, 1) && g.ok(i, 2));
            } else {
                out.at(i, j) = (3.0 * g.at(i, j) - 4.0 * g.at(i, j - 1) +
                                g.at(i, j - 2)) / (2.0 * d);
                out.set_mask(i, j, g.ok(i, j) && g.ok(i, j - 1) && g.ok(i, j - 2));
            }
        }
    }
    return out;
}

// Central second derivatives; defined on the interior only (boundary masked).
template <class T>
Grid<T> fd_duu(const Grid<T>& g) {
    const GridSpec& s = g.spec;
    const double d2 = s.du() * s.du();
    Grid<T> out(s);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            if (i == 0 || i == s.nu - 1) {
                out.set_mask(i, j, false);
                continue;
            }
            out.at(i, j) =
                (g.at(i + 1, j) - 2.0 * g.at(i, j) + g.at(i - 1, j)) / d2;
            out.set_mask(i, j, g.ok(i - 1, j) && g.ok(i, j) && g.ok(i + 1, j));
        }
    return out;
}

template <class T>
Grid<T> fd_dvv(const Grid<T>& g) {
    const GridSpec& s = g.spec;
    const double d2 = s.dv() * s.dv();
    Grid<T> out(s);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i) {
            if (j == 0 || j == s.nv - 1) {
                out.set_mask(i, j, false);
                continue;
            }
            out.at(i, j) =
                (g.at(i, j + 1) - 2.0 * g.at(i, j) + g.at(i, j - 1)) / d2;
            out.set_mask(i, j, g.ok(i, j - 1) && g.ok(i, j) && g.ok(i, j + 1));
        }
    return out;
}

// Central mixed derivative; defined on the interior only (boundary masked).
template <class T>
Grid<T> fd_duv(const Grid<T>& g) {
    const GridSpec& s = g.spec;
    const double d4 = 4.0 * s.du() * s.dv();
    Grid<T> out(s);
    for (int j = 0; j < s.nv; ++j) {
        for (int i = 0; i < s.nu; ++i) {
            if (i == 0 || i == s.nu - 1 || j == 0 || j == s.nv - 1) {
                out.set_mask(i, j, false);
                continue;
            }
            out.at(i, j) = (g.at(i + 1, j + 1) - g.at(i + 1, j - 1) -
                            g.at(i - 1, j + 1) + g.at(i - 1, j - 1)) / d4;
            out.set_mask(i, j, g.ok(i + 1, j + 1) && g.ok(i + 1, j - 1) &&
                                   g.ok(i - 1, j + 1) && g.ok(i - 1, j - 1));
        }
    }
    return out;
}

// Clamped bilinear interpolation of a scalar grid (mask ignored; intended for
// smooth unmasked fields such as integration seeds).
inline double bilinear(const Grid<double>& g, double u, double v) {
    const GridSpec& s = g.spec;
    double x = (u - s.u0) / s.du();
    double y = (v - s.v0) / s.dv();
    x = std::min(std::max(x, 0.0), static_cast<double>(s.nu - 1));
    y = std::min(std::max(y, 0.0), static_cast<double>(s.nv - 1));
    const int i = std::min(static_cast<int>(x), s.nu - 2);
    const int j = std::min(static_cast<int>(y), s.nv - 2);
    const double fx = x - i, fy = y - j;
    return (1 - fx) * (1 - fy) * g.at(i, j) + fx * (1 - fy) * g.at(i + 1, j) +
           (1 - fx) * fy * g.at(i, j + 1) + fx * fy * g.at(i + 1, j + 1);
}

} // namespace tzlab

#endif // TZLAB_FD_HPP
