#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "innerlab/composition.hpp"
#include "innerlab/experiment.hpp"
#include "innerlab/statistics.hpp"
#include "innerlab/target.hpp"

namespace py = pybind11;
using namespace innerlab;
using cplx = std::complex<double>;

namespace {

// Sequence families mirrored from the experiment configs. "table" copies the
// given values so worker threads never touch Python objects.
RealSequenceFn make_family(const std::string& family, double value, double exponent,
                           const std::vector<double>& values) {
    if (family == "default") return default_family_term;
    if (family == "const") return [value](std::int64_t) { return value; };
    if (family == "log")
        return [value](std::int64_t n) {
            return value / std::log(static_cast<double>(n) + 2.0);
        };
    if (family == "power")
        return [value, exponent](std::int64_t n) {
            return std::min(value, std::pow(static_cast<double>(n), -exponent));
        };
    if (family == "table") {
        auto table = std::make_shared<std::vector<double>>(values);
        return [table](std::int64_t n) -> double {
            if (n < 1 || n > static_cast<std::int64_t>(table->size()))
                throw DomainError("family table: index out of range");
            return (*table)[static_cast<std::size_t>(n - 1)];
        };
    }
    throw DomainError("unknown family '" + family + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Forward compositions of inner functions on the unit disk: maps, "
              "shrinking targets, hyperbolic distortion, and hit statistics.";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted", PyExc_RuntimeError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
    py::register_exception<HorizonError>(m, "HorizonError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.attr("TWO_PI") = kTwoPi;

    py::class_<Arc>(m, "Arc")
        .def(py::init([](double center, double half_length) {
                 return Arc(Angle(center), half_length);
             }),
             py::arg("center"), py::arg("half_length"))
        .def_static("full", &Arc::full)
        .def_static("from_endpoints",
                    [](double a, double b) {
                        return Arc::from_endpoints(Angle(a), Angle(b));
                    })
        .def_property_readonly("center", [](const Arc& a) { return a.center.value; })
        .def_readonly("half_length", &Arc::half_length)
        .def("length", &Arc::length)
        .def("contains", [](const Arc& a, double t) { return a.contains(Angle(t)); })
        .def("__repr__", [](const Arc& a) {
            return "Arc(center=" + std::to_string(a.center.value) +
                   ", half_length=" + std::to_string(a.half_length) + ")";
        });

    py::class_<ArcUnion>(m, "ArcUnion")
        .def(py::init<>())
        .def(py::init<std::vector<Arc>>())
        .def_static("full_circle", &ArcUnion::full_circle)
        .def("arcs", &ArcUnion::arcs)
        .def("measure", &ArcUnion::measure)
        .def("contains", [](const ArcUnion& u, double t) { return u.contains(Angle(t)); })
        .def("unite", &ArcUnion::unite)
        .def("intersect", &ArcUnion::intersect)
        .def("complement", &ArcUnion::complement)
        .def("__len__", &ArcUnion::size);

    m.def("harmonic_measure",
          [](cplx z, const ArcUnion& u) { return harmonic_measure(z, u); });
    m.def("harmonic_measure", [](cplx z, const Arc& a) { return harmonic_measure(z, a); });

    py::class_<MobiusAutomorphism>(m, "MobiusAutomorphism")
        .def(py::init<cplx, cplx>(), py::arg("a"), py::arg("tau") = cplx(1.0))
        .def_static("identity", &MobiusAutomorphism::identity)
        .def_static("rotation", &MobiusAutomorphism::rotation)
        .def_static("translation_to", &MobiusAutomorphism::translation_to)
        .def_property_readonly("a", &MobiusAutomorphism::a)
        .def_property_readonly("tau", &MobiusAutomorphism::tau)
        .def("apply", &MobiusAutomorphism::apply)
        .def("derivative", &MobiusAutomorphism::derivative)
        .def("apply_boundary",
             [](const MobiusAutomorphism& m_, double t) {
                 return m_.apply_boundary(Angle(t)).value;
             })
        .def("inverse", &MobiusAutomorphism::inverse)
        .def("compose", &MobiusAutomorphism::compose);

    py::class_<FiniteBlaschke>(m, "FiniteBlaschke")
        .def(py::init<cplx, std::vector<cplx>>(), py::arg("tau"), py::arg("zeros"))
        .def_static("rotation", &FiniteBlaschke::rotation)
        .def_static("factor", &FiniteBlaschke::factor)
        .def_static("centered_degree2", &FiniteBlaschke::centered_degree2)
        .def_property_readonly("degree", &FiniteBlaschke::degree)
        .def_property_readonly("zeros", &FiniteBlaschke::zeros)
        .def_property_readonly("tau", &FiniteBlaschke::tau)
        .def("is_centered", &FiniteBlaschke::is_centered)
        .def("eval", &FiniteBlaschke::eval)
        .def("derivative", &FiniteBlaschke::derivative)
        .def("boundary_map",
             [](const FiniteBlaschke& b, double t) {
                 return b.boundary_map(Angle(t)).value;
             })
        .def("boundary_derivative",
             [](const FiniteBlaschke& b, double t) {
                 return b.boundary_derivative(Angle(t));
             })
        .def("lift", &FiniteBlaschke::lift)
        .def("lift_inverse", &FiniteBlaschke::lift_inverse)
        .def("arc_preimage", &FiniteBlaschke::arc_preimage);

    m.def("to_blaschke", &to_blaschke);
    m.def("compose", &compose, py::arg("outer"), py::arg("inner"));

    py::class_<MapChain>(m, "MapChain")
        .def(py::init<>())
        .def(py::init<FiniteBlaschke>())
        .def(py::init<std::vector<FiniteBlaschke>>())
        .def("factors", &MapChain::factors)
        .def("degree", &MapChain::degree)
        .def("eval", &MapChain::eval)
        .def("derivative", &MapChain::derivative)
        .def("boundary_map",
             [](const MapChain& c, double t) { return c.boundary_map(Angle(t)).value; })
        .def("preimage", &MapChain::preimage, py::arg("target"),
             py::arg("arc_budget") = kArcBudget)
        .def("hyperbolic_distortion", &MapChain::hyperbolic_distortion)
        .def("then", &MapChain::then);

    py::class_<InnerMapSequence>(m, "InnerMapSequence")
        .def_static("autonomous",
                    [](const FiniteBlaschke& f) { return InnerMapSequence::autonomous(f); })
        .def_static("from_table",
                    [](std::vector<MapChain> maps) {
                        return InnerMapSequence::from_table(std::move(maps));
                    })
        .def("at", &InnerMapSequence::at)
        .def_property_readonly("name", &InnerMapSequence::name);

    py::class_<TargetSequence>(m, "TargetSequence")
        .def("at", &TargetSequence::at)
        .def("length_sum", &TargetSequence::length_sum)
        .def("phi", &TargetSequence::phi);

    m.def(
        "nested_target",
        [](double center, const std::string& family, double value, double exponent,
           const std::vector<double>& values) {
            return nested_target(Angle(center),
                                 make_family(family, value, exponent, values));
        },
        py::arg("center") = 0.0, py::arg("family") = "default", py::arg("value") = 0.5,
        py::arg("exponent") = 0.1, py::arg("values") = std::vector<double>{});

    py::class_<SystemMetadata>(m, "SystemMetadata")
        .def_readonly("name", &SystemMetadata::name)
        .def_readonly("verdict", &SystemMetadata::verdict)
        .def_readonly("claim", &SystemMetadata::claim);

    py::class_<ExampleSystem>(m, "ExampleSystem")
        .def_readonly("maps", &ExampleSystem::maps)
        .def_readonly("meta", &ExampleSystem::meta)
        .def_property_readonly("target",
                               [](const ExampleSystem& s) {
                                   return s.target ? py::cast(*s.target)
                                                   : py::object(py::none());
                               })
        .def("mu_at", [](const ExampleSystem& s, std::int64_t n) {
            if (!s.mu) throw DomainError("system has no mu sequence");
            return s.mu(n);
        });

    m.def("default_family_term", &default_family_term);
    m.def("default_family_epsilon", &default_family_epsilon);
    m.def("mobius_for_arc", &mobius_for_arc);
    m.def("arc_involution", &arc_involution);
    m.def("rotation_index", [](std::int64_t n) {
        RotationIndex idx = rotation_index(n);
        return py::make_tuple(idx.m, idx.k);
    });
    m.def("rotation_flat_index", &rotation_flat_index);

    m.def("ex_rotations", &ex_rotations, py::arg("max_stage"));
    auto bind_paired_system = [&m](const char* name, auto fn) {
        m.def(
            name,
            [fn](const std::string& mu_family, double mu_value, double mu_exponent,
                 const std::vector<double>& mu_values, const std::string& length_family,
                 double length_value, double length_exponent,
                 const std::vector<double>& length_values) {
                return fn(make_family(mu_family, mu_value, mu_exponent, mu_values),
                          make_family(length_family, length_value, length_exponent,
                                      length_values));
            },
            py::arg("mu_family") = "default", py::arg("mu_value") = 0.5,
            py::arg("mu_exponent") = 0.1, py::arg("mu_values") = std::vector<double>{},
            py::arg("length_family") = "default", py::arg("length_value") = 0.5,
            py::arg("length_exponent") = 0.1,
            py::arg("length_values") = std::vector<double>{});
    };
    bind_paired_system("ex_nested_blaschke", &ex_nested_blaschke);
    bind_paired_system("ex_conjugated", &ex_conjugated);
    bind_paired_system("ex_rescaled", &ex_rescaled);
    m.def("ex_parabolic", &ex_parabolic);
    m.def(
        "ex_lengths_from_mu",
        [](const std::string& mu_family, double mu_value, double mu_exponent,
           const std::vector<double>& mu_values, std::int64_t horizon, double cap) {
            LengthsFromMu res = ex_lengths_from_mu(
                make_family(mu_family, mu_value, mu_exponent, mu_values), horizon, cap);
            return py::make_tuple(res.ns, res.lengths);
        },
        py::arg("mu_family") = "log", py::arg("mu_value") = 1.0,
        py::arg("mu_exponent") = 0.1, py::arg("mu_values") = std::vector<double>{},
        py::arg("horizon") = 100000, py::arg("cap") = 1.0);

    m.def(
        "fixed_target_system",
        [](const FiniteBlaschke& map, const Arc& arc) {
            return ExampleSystem{
                InnerMapSequence::autonomous(map),
                TargetSequence([arc](std::int64_t) { return arc; }, "fixed"),
                {"fixed", "", ""},
                nullptr};
        },
        py::arg("map"), py::arg("arc"),
        "Autonomous system with one map and a constant target arc.");

    py::class_<CompositionState>(m, "CompositionState")
        .def_static("initial", &CompositionState::initial,
                    py::arg("base_point") = cplx(0.0))
        .def_readonly("base_point", &CompositionState::base_point)
        .def_readonly("orbit", &CompositionState::orbit)
        .def_readonly("lambdas", &CompositionState::lambdas)
        .def_readonly("one_minus_abs", &CompositionState::one_minus_abs)
        .def_readonly("mu_sum", &CompositionState::mu_sum)
        .def_readonly("lambda_product", &CompositionState::lambda_product)
        .def_property_readonly("n", &CompositionState::n);

    m.def("advance", &advance, py::arg("state"), py::arg("sequence"), py::arg("steps"));

    py::class_<ContractionReport>(m, "ContractionReport")
        .def_readonly("lambda_product", &ContractionReport::lambda_product)
        .def_readonly("mu_sum", &ContractionReport::mu_sum)
        .def_readonly("verdict", &ContractionReport::verdict);
    m.def("contraction_report", &contraction_report);

    py::class_<Normalization>(m, "Normalization")
        .def_readonly("normalized", &Normalization::normalized)
        .def_readonly("mobius", &Normalization::mobius);
    m.def("normalize", &normalize);

    py::enum_<BlockVariant>(m, "BlockVariant")
        .value("MAX_LENGTH", BlockVariant::kMaxLength)
        .value("MIN_MU", BlockVariant::kMinMu);

    py::class_<BlockPartition>(m, "BlockPartition")
        .def_readonly("ns", &BlockPartition::ns)
        .def_readonly("ms", &BlockPartition::ms)
        .def_readonly("block_mu_sums", &BlockPartition::block_mu_sums)
        .def_readonly("block_products", &BlockPartition::block_products);

    m.def(
        "block_partition",
        [](const std::vector<double>& mu, const std::vector<double>& lengths,
           BlockVariant variant, std::int64_t blocks) {
            return block_partition(mu, lengths, variant, blocks);
        },
        py::arg("mu"), py::arg("lengths") = std::vector<double>{},
        py::arg("variant") = BlockVariant::kMaxLength, py::arg("blocks") = 1);
    m.def("block_compose", &block_compose);

    py::class_<HitStatistics>(m, "HitStatistics")
        .def_readonly("sample_points", &HitStatistics::sample_points)
        .def_readonly("checkpoints", &HitStatistics::checkpoints)
        .def_readonly("counts", &HitStatistics::counts)
        .def_readonly("first_hit", &HitStatistics::first_hit)
        .def_readonly("phi", &HitStatistics::phi);
    m.def(
        "hit_count",
        [](const ExampleSystem& sys, const std::vector<double>& thetas,
           const std::vector<std::int64_t>& checkpoints) {
            return hit_count(sys, thetas, checkpoints);
        },
        py::arg("system"), py::arg("thetas"), py::arg("checkpoints"));

    py::class_<MeasureEstimate>(m, "MeasureEstimate")
        .def_readonly("fraction", &MeasureEstimate::fraction)
        .def_readonly("ci_low", &MeasureEstimate::ci_low)
        .def_readonly("ci_high", &MeasureEstimate::ci_high)
        .def_readonly("samples", &MeasureEstimate::samples)
        .def_readonly("seed", &MeasureEstimate::seed);
    m.def("hit_measure", &hit_measure, py::arg("system"), py::arg("n0"), py::arg("n1"),
          py::arg("samples"), py::arg("seed"), py::arg("threads") = 0,
          py::call_guard<py::gil_scoped_release>());

    m.def("exact_preimage", &exact_preimage, py::arg("system"), py::arg("n"),
          py::arg("arc_budget") = kArcBudget);
    m.def("exact_hit_union", &exact_hit_union, py::arg("system"), py::arg("n0"),
          py::arg("n1"), py::arg("arc_budget") = kArcBudget);

    py::class_<OverlapRecord>(m, "OverlapRecord")
        .def_readonly("lhs", &OverlapRecord::lhs)
        .def_readonly("product_term", &OverlapRecord::product_term)
        .def_readonly("excess", &OverlapRecord::excess);
    m.def("overlap_correlation", &overlap_correlation, py::arg("system"), py::arg("m"),
          py::arg("n"), py::arg("arc_budget") = kArcBudget);

    m.def("boundary_orbit", &boundary_orbit, py::arg("sequence"), py::arg("theta0"),
          py::arg("N"));

    py::class_<DensityProfile>(m, "DensityProfile")
        .def_readonly("cells", &DensityProfile::cells)
        .def_readonly("visits", &DensityProfile::visits)
        .def_readonly("min_visits", &DensityProfile::min_visits);
    m.def("density_profile", &density_profile, py::arg("sequence"), py::arg("theta0"),
          py::arg("N"), py::arg("K"));

    m.def("dw_profile", &dw_profile, py::arg("sequence"), py::arg("theta0"), py::arg("N"),
          py::arg("base_point") = cplx(0.0));
    m.def("mixing_defect", &mixing_defect, py::arg("sequence"), py::arg("A"), py::arg("E"),
          py::arg("n"), py::arg("arc_budget") = kArcBudget);

    py::class_<CriterionOutcome>(m, "CriterionOutcome")
        .def_readonly("name", &CriterionOutcome::name)
        .def_readonly("passed", &CriterionOutcome::pass)
        .def_readonly("measured", &CriterionOutcome::measured)
        .def_readonly("detail", &CriterionOutcome::detail);
    py::class_<RunOutcome>(m, "RunOutcome")
        .def_readonly("exit_code", &RunOutcome::exit_code)
        .def_readonly("out_dir", &RunOutcome::out_dir)
        .def_readonly("manifest_path", &RunOutcome::manifest_path)
        .def_readonly("files", &RunOutcome::files)
        .def_readonly("criteria", &RunOutcome::criteria);
    m.def(
        "run_config",
        [](const std::string& path, const std::string& out_dir, int threads) {
            ExperimentConfig cfg = ExperimentConfig::from_file(path);
            RunOptions opt;
            opt.out_dir = out_dir;
            opt.threads = threads;
            return run_experiment(cfg, opt);
        },
        py::arg("path"), py::arg("out_dir") = "", py::arg("threads") = -1);
    m.def("list_presets", &list_presets);
    m.def("preset_names", &preset_names);
}
