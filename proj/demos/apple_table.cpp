// Builds the apple-production comparison table through the library API.

#include <iostream>

#include "varest/varest.hpp"

int main() {
    varest::ParamInputs in;
    in.N = 104;
    in.n = 20;
    in.Sy2 = 11.669964 * 11.669964;
    in.Sx2 = 23029.072 * 23029.072;
    in.Cy = 1.866;
    in.Cx = 1.653;
    in.rho_yx = 0.865;
    in.Cyx = 2.668;
    in.beta2y = 16.523;
    in.beta2x = 17.516;
    in.lambda22 = 14.398;
    const auto params = varest::make_params(in);
    const double th = varest::theta(20, params.N);

    auto rows = varest::compare_table(params, th, varest::default_roster(), varest::MseFormulaVariant::Rederived);
    rows.push_back(varest::t_optimal(params, th, -1.0, 1.0, 5.0, 1.0, varest::MseFormulaVariant::Rederived));
    varest::write_markdown(std::cout, rows);
}
