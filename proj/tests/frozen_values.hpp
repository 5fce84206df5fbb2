#pragma once
// Generated by tests/oracles/make_frozen.py; do not edit by hand.
#include <cstddef>
namespace frozen {
inline constexpr std::size_t kLandscape1dNodes[] = {0, 10, 160, 170, 319};
inline constexpr double kLandscape1dValues[] = {0.19253625615692532, 1.9805016204389749, 11.793662287707537, 11.845220171795615, 0.19262207960515701};
inline constexpr std::size_t kLandscape2dNodes[] = {0, 410, 430, 1230, 1599};
inline constexpr double kLandscape2dValues[] = {9.4384041590049588, 9.4324333989461131, 9.3863534425294795, 9.4090064280520913, 9.43783054184496};
inline constexpr std::size_t kSynthetic3dNodes[] = {0, 500, 863, 1727};
inline constexpr double kSynthetic3dValues[] = {0.016655674801303304, 0.17649729148740692, 0.03219317405031822, 0.016623746854056737};
inline constexpr std::size_t kGreenFreeNodes[] = {0, 16, 31, 32, 48, 63};
inline constexpr double kGreenFreeValues[] = {0.0078052843938125321, 0.15899066798404943, 0.45256505433116356, 0.48280476830440139, 0.15646123065851433, 0.0083268217182033803};
inline constexpr double kAgmon1dLhsRhs[] = {0.59450418766233848, 20.018387491415062};
inline constexpr double kGapMomentsQHalf[] = {4, 4.4721359549995796, 5.5252760152726754, 7.755107165157245};
inline constexpr double kGapMomentsQQuarter[] = {8, 9.3808315196468595, 12.202017069463475, 17.794486819196479};
inline constexpr std::size_t kEdgeCubeSites2d[] = {1, 1, 9, 49, 225, 961};
inline constexpr double kChooseKClosed[] = {0.5, 0.5, 0.5, 0.90000000000000002, 0.75, 0.98999999999999999, 0.999};
inline constexpr int kChooseKDim[] = {1, 2, 3, 2, 2, 2, 2};
inline constexpr int kChooseKExpected[] = {3, 3, 3, 3, 3, 5, 6};
inline constexpr double kFitRateInterceptR2[] = {0.3005826459181184, 0.69908067589831446, 0.99955267503548695};
inline constexpr int kChemicalDistance5x5[] = {1, 0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 1, 1, 1};
}  // namespace frozen
