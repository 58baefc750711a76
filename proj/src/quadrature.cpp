#include "ecx/quadrature.hpp"

#include <array>
#include <thread>

namespace ecx {

namespace {
int g_workers = 0;
}

int worker_count() {
    if (g_workers > 0) return g_workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int n) { g_workers = n < 0 ? 0 : n; }

namespace {

// abscissas (positive half) and weights on [-1,1]
constexpr std::array<double, 2> kGl4X = {0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 2> kGl4W = {0.6521451548625461, 0.3478548451374538};

constexpr std::array<double, 4> kGl8X = {0.1834346424956498, 0.5255324099163290,
                                         0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGl8W = {0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

constexpr std::array<double, 8> kGl16X = {0.0950125098376374, 0.2816035507792589,
                                          0.4580167776572274, 0.6178762444026438,
                                          0.7554044083550030, 0.8656312023878318,
                                          0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGl16W = {0.1894506104550685, 0.1826034150449236,
                                          0.1691565193950025, 0.1495959888165767,
                                          0.1246289712555339, 0.0951585116824928,
                                          0.0622535239386479, 0.0271524594117541};

constexpr std::array<double, 16> kGl32X = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371, 0.3318686022821277,
    0.4213512761306353, 0.5068999089322294, 0.5877157572407623, 0.6630442669302152,
    0.7321821187402897, 0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684, 0.9972638618494816};
constexpr std::array<double, 16> kGl32W = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046, 0.0911738786957639,
    0.0876520930044038, 0.0833119242269467, 0.0781938957870703, 0.0723457941088485,
    0.0658222227763618, 0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057, 0.0070186100094701};

template <std::size_t N>
std::vector<QuadNode> reflect(const std::array<double, N>& x, const std::array<double, N>& w) {
    std::vector<QuadNode> nodes;
    nodes.reserve(2 * N);
    for (std::size_t i = N; i-- > 0;) nodes.push_back({-x[i], w[i]});
    for (std::size_t i = 0; i < N; ++i) nodes.push_back({x[i], w[i]});
    return nodes;
}

const std::vector<QuadNode>& gl_reference(int order) {
    static const std::vector<QuadNode> g4 = reflect(kGl4X, kGl4W);
    static const std::vector<QuadNode> g8 = reflect(kGl8X, kGl8W);
    static const std::vector<QuadNode> g16 = reflect(kGl16X, kGl16W);
    static const std::vector<QuadNode> g32 = reflect(kGl32X, kGl32W);
    switch (order) {
        case 4: return g4;
        case 8: return g8;
        case 16: return g16;
        case 32: return g32;
        default: throw std::invalid_argument("gauss_legendre: unsupported order");
    }
}

}  // namespace

std::vector<QuadNode> gauss_legendre(double a, double b, int order) {
    const auto& ref = gl_reference(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<QuadNode> nodes;
    nodes.reserve(ref.size());
    for (const auto& n : ref) nodes.push_back({mid + half * n.x, half * n.w});
    return nodes;
}

std::vector<QuadNode> quad_nodes_1d(double a, double b, int n, QuadRule rule) {
    if (n < 1) throw std::invalid_argument("quad_nodes_1d: n < 1");
    std::vector<QuadNode> nodes;
    if (rule == QuadRule::Midpoint) {
        const double h = (b - a) / n;
        nodes.reserve(n);
        for (int i = 0; i < n; ++i) nodes.push_back({a + (i + 0.5) * h, h});
    } else {
        const int cells = std::max(1, n / 4);
        const double h = (b - a) / cells;
        nodes.reserve(4 * cells);
        for (int c = 0; c < cells; ++c) {
            for (const auto& node : gauss_legendre(a + c * h, a + (c + 1) * h, 4)) nodes.push_back(node);
        }
    }
    return nodes;
}

}  // namespace ecx
