#include "bacoord/curve/spectral_data.hpp"

#include <algorithm>

#include "bacoord/errors.hpp"

namespace bacoord {

bool same_point(const CurvePoint& a, const CurvePoint& b, double tol) {
    return a.component == b.component && approx_equal(a.location, b.location, tol);
}

Complex EssentialPoint::local_coordinate(const SpherePoint& z) const {
    if (point.location.is_infinite()) {
        if (z.is_infinite()) throw PoleEvaluation("local parameter k = z is infinite at infinity");
        return z.value();
    }
    if (z.is_infinite()) return 0.0;
    const Complex t = z.value() - point.location.value();
    if (t == Complex{}) throw PoleEvaluation("local parameter 1/(z - p) is infinite at p");
    return 1.0 / t;
}

CurvePoint Involution::operator()(const CurvePoint& x) const {
    return {component_map.at(x.component), maps.at(x.component)(x.location)};
}

std::optional<std::size_t> SpectralData::find_component(std::string_view id) const {
    const auto it = std::find(components.begin(), components.end(), id);
    if (it == components.end()) return std::nullopt;
    return static_cast<std::size_t>(it - components.begin());
}

int SpectralData::arithmetic_genus() const noexcept {
    return static_cast<int>(nodes.size()) - static_cast<int>(components.size()) + 1;
}

const EssentialPoint& SpectralData::essential(int flow_index) const {
    for (const auto& e : essential_points)
        if (e.flow_index == flow_index) return e;
    throw std::out_of_range("no essential point with flow index " + std::to_string(flow_index));
}

const QPoint& SpectralData::q_point(int coordinate_index) const {
    for (const auto& q : q_points)
        if (q.coordinate_index == coordinate_index) return q;
    throw std::out_of_range("no Q point with coordinate index " + std::to_string(coordinate_index));
}

std::vector<std::size_t> SpectralData::psi_poles_on(std::size_t component) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < psi_poles.size(); ++k)
        if (psi_poles[k].component == component) out.push_back(k);
    return out;
}

std::vector<std::size_t> SpectralData::essential_points_on(std::size_t component) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < essential_points.size(); ++k)
        if (essential_points[k].point.component == component) out.push_back(k);
    return out;
}

bool SpectralData::parameters_bound() const { return unbound_parameters().empty(); }

std::vector<std::string> SpectralData::unbound_parameters() const {
    std::vector<std::string> out;
    for (const auto& [name, value] : parameters)
        if (!value) out.push_back(name);
    return out;
}

Complex SpectralData::omega_scale(std::size_t component) const {
    const ComponentForm& f = omega.at(component);
    if (!f.parameter) return f.scale;
    const auto it = parameters.find(*f.parameter);
    if (it == parameters.end() || !it->second)
        throw UnboundParameter("parameter '" + *f.parameter + "' of the form on " + components.at(component) +
                               " is not bound");
    return f.scale * *it->second;
}

RationalOneForm SpectralData::omega_form(std::size_t component) const {
    const ComponentForm& f = omega.at(component);
    const Complex scale = omega_scale(component);
    if (scale == Complex{}) return {RationalFunction{}};
    return {RationalFunction(f.numerator, f.poles, scale)};
}

SpectralData SpectralData::with_parameter(const std::string& name, Complex value) const {
    SpectralData out = *this;
    out.parameters[name] = value;
    return out;
}

std::string SpectralData::describe(const CurvePoint& x) const {
    return x.location.to_string() + " on " + components.at(x.component);
}

}  // namespace bacoord
