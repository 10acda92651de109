#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bacoord/ratfun/mobius.hpp"
#include "bacoord/ratfun/rational_function.hpp"

namespace bacoord {

/// A point on one component of the normalized curve.
struct CurvePoint {
    std::size_t component = 0;
    SpherePoint location;
};

bool same_point(const CurvePoint& a, const CurvePoint& b, double tol);

struct EssentialPoint {
    CurvePoint point;
    int flow_index = 0;  // 1-based

    /// k = z at infinity, k = 1/(z - p) at a finite point.
    LocalParameter local_parameter() const {
        return point.location.is_infinite() ? LocalParameter::Affine : LocalParameter::InversePole;
    }
    /// k(z). Undefined (throws PoleEvaluation) at the point itself.
    Complex local_coordinate(const SpherePoint& z) const;
};

struct QPoint {
    CurvePoint point;
    int coordinate_index = 0;  // 1-based
};

struct NormalizationPoint {
    CurvePoint point;
    Complex value;
};

struct Node {
    CurvePoint p;
    CurvePoint q;
    Complex lambda;
};

/// Per-component Möbius maps together with a permutation of the components.
struct Involution {
    std::vector<std::size_t> component_map;
    std::vector<MobiusMap> maps;
    bool conjugating = false;

    CurvePoint operator()(const CurvePoint& x) const;
};

/// Ω restricted to one component, before its scale is resolved.
struct ComponentForm {
    Polynomial numerator;
    std::vector<Pole> poles;
    Complex scale{1.0};
    std::optional<std::string> parameter;  // when set, the scale is this parameter's value
};

struct SpectralData {
    int dimension = 0;
    std::vector<std::string> components;
    std::vector<EssentialPoint> essential_points;
    std::vector<QPoint> q_points;
    std::vector<NormalizationPoint> normalization;
    std::vector<CurvePoint> psi_poles;
    std::vector<Node> nodes;
    std::optional<Involution> sigma;
    std::optional<Involution> tau;
    std::vector<ComponentForm> omega;
    /// nullopt marks a parameter to be solved for.
    std::map<std::string, std::optional<Complex>> parameters;
    std::string description;

    std::size_t component_count() const noexcept { return components.size(); }
    std::optional<std::size_t> find_component(std::string_view id) const;
    const std::string& component_name(std::size_t c) const { return components.at(c); }

    /// g_a = #nodes - #components + 1 for a connected nodal curve of rational components.
    int arithmetic_genus() const noexcept;

    const EssentialPoint& essential(int flow_index) const;
    const QPoint& q_point(int coordinate_index) const;

    std::vector<std::size_t> psi_poles_on(std::size_t component) const;
    std::vector<std::size_t> essential_points_on(std::size_t component) const;

    bool parameters_bound() const;
    std::vector<std::string> unbound_parameters() const;

    /// The resolved scale of Ω on a component. Throws UnboundParameter.
    Complex omega_scale(std::size_t component) const;
    /// Ω on a component as an exact form. Throws UnboundParameter.
    RationalOneForm omega_form(std::size_t component) const;

    /// Copy with one parameter bound to a value.
    SpectralData with_parameter(const std::string& name, Complex value) const;

    std::string describe(const CurvePoint& x) const;
};

}  // namespace bacoord
