#pragma once

namespace decaycoh {

/// sin(x)/x with the removable singularity filled in (sinc(0) == 1).
double sinc_unnormalized(double x);

/// Bessel function of the first kind, order zero. Absolute error below 1e-12
/// for |x| <= 100.
double bessel_j0(double x);

/// Coherence of a spherically isotropic (diffuse) field: sinc(k d).
double spherical_coherence(double k, double d);

/// Coherence of a cylindrically isotropic field with the sensor axis in the
/// plane of incidence: J0(k d).
double cylindrical_coherence(double k, double d);

}  // namespace decaycoh
