"""Recorded results of the efficient perceptual SR challenge on PSR4K.

These are the published leaderboard numbers: per-method metric aggregates,
official Scores, efficiency figures, per-class metric values for the ten
PSR4K categories, and the per-class summary statistics. They anchor the
replay tests and the CLI's replay mode.
"""

BASELINE_METHOD = "Real-ESRGAN"

CLASS_NAMES = ("animals", "architecture", "art", "food", "nature",
               "objects", "portraits", "sports", "text", "urban")

METRIC_DIRECTIONS = {"PI": "lower_better", "CLIPIQA": "higher_better",
                     "MANIQA": "higher_better"}

# method -> (PI, CLIPIQA, MANIQA) dataset aggregates on PSR4K
PSR4K_AGGREGATE = {
    "Real-ESRGAN": {"PI": 4.1442, "CLIPIQA": 0.5302, "MANIQA": 0.3283},
    "VPEG":        {"PI": 3.1205, "CLIPIQA": 0.6544, "MANIQA": 0.3919},
    "MiAlgo":      {"PI": 3.7420, "CLIPIQA": 0.5999, "MANIQA": 0.3662},
    "IPIU":        {"PI": 6.0676, "CLIPIQA": 0.3951, "MANIQA": 0.2722},
    "BSRGAN":      {"PI": 4.2112, "CLIPIQA": 0.5779, "MANIQA": 0.3350},
    "SPAN":        {"PI": 6.1198, "CLIPIQA": 0.3996, "MANIQA": 0.2748},
    "R2NET":       {"PI": 6.6837, "CLIPIQA": 0.3750, "MANIQA": 0.2811},
}

# Official Scores (lower is better); the baseline row scores e against itself.
PSR4K_SCORES = {
    "Real-ESRGAN": 2.7182,
    "VPEG": 2.2015,
    "MiAlgo": 2.4512,
    "IPIU": 3.9536,
    "BSRGAN": 2.6731,
    "SPAN": 3.9571,
    "R2NET": 4.3401,
}

# method -> (params in M, GMACs at 960x540)
EFFICIENCY = {
    "Real-ESRGAN": (16.6980, 9293.9416),
    "VPEG": (3.1684, 1631.0842),
    "MiAlgo": (3.5214, 1987.3922),
    "IPIU": (0.2762, 132.1431),
    "BSRGAN": (16.6980, 9293.9416),
    "SPAN": (0.1507, 77.7870),
    "R2NET": (0.2148, 103.2455),
}

# method -> class -> {PI, CLIPIQA, MANIQA}
PSR4K_PER_CLASS = {
    "Real-ESRGAN": {
        "animals":      {"PI": 4.1044, "CLIPIQA": 0.5387, "MANIQA": 0.3254},
        "architecture": {"PI": 3.4564, "CLIPIQA": 0.5727, "MANIQA": 0.3791},
        "art":          {"PI": 4.3428, "CLIPIQA": 0.5184, "MANIQA": 0.3009},
        "food":         {"PI": 4.9594, "CLIPIQA": 0.4307, "MANIQA": 0.2788},
        "nature":       {"PI": 3.4804, "CLIPIQA": 0.5560, "MANIQA": 0.3139},
        "objects":      {"PI": 3.9726, "CLIPIQA": 0.5359, "MANIQA": 0.3353},
        "portraits":    {"PI": 4.3434, "CLIPIQA": 0.5189, "MANIQA": 0.3135},
        "sports":       {"PI": 4.6794, "CLIPIQA": 0.5310, "MANIQA": 0.3252},
        "text":         {"PI": 4.5560, "CLIPIQA": 0.5576, "MANIQA": 0.3610},
        "urban":        {"PI": 3.5492, "CLIPIQA": 0.5423, "MANIQA": 0.3495},
    },
    "VPEG": {
        "animals":      {"PI": 2.8712, "CLIPIQA": 0.6507, "MANIQA": 0.3635},
        "architecture": {"PI": 3.1070, "CLIPIQA": 0.6550, "MANIQA": 0.4342},
        "art":          {"PI": 3.1056, "CLIPIQA": 0.6779, "MANIQA": 0.3852},
        "food":         {"PI": 3.4790, "CLIPIQA": 0.6187, "MANIQA": 0.3403},
        "nature":       {"PI": 2.9538, "CLIPIQA": 0.6512, "MANIQA": 0.3702},
        "objects":      {"PI": 3.0282, "CLIPIQA": 0.6523, "MANIQA": 0.4038},
        "portraits":    {"PI": 3.0018, "CLIPIQA": 0.6726, "MANIQA": 0.3774},
        "sports":       {"PI": 3.1226, "CLIPIQA": 0.6665, "MANIQA": 0.3931},
        "text":         {"PI": 3.6368, "CLIPIQA": 0.6566, "MANIQA": 0.4300},
        "urban":        {"PI": 2.9012, "CLIPIQA": 0.6425, "MANIQA": 0.4221},
    },
    "MiAlgo": {
        "animals":      {"PI": 3.5588, "CLIPIQA": 0.5981, "MANIQA": 0.3567},
        "architecture": {"PI": 3.3224, "CLIPIQA": 0.6604, "MANIQA": 0.4324},
        "art":          {"PI": 3.9396, "CLIPIQA": 0.5614, "MANIQA": 0.3347},
        "food":         {"PI": 4.3602, "CLIPIQA": 0.4829, "MANIQA": 0.2874},
        "nature":       {"PI": 3.3214, "CLIPIQA": 0.6586, "MANIQA": 0.3707},
        "objects":      {"PI": 3.6186, "CLIPIQA": 0.6190, "MANIQA": 0.3786},
        "portraits":    {"PI": 3.7072, "CLIPIQA": 0.5855, "MANIQA": 0.3431},
        "sports":       {"PI": 4.1018, "CLIPIQA": 0.5743, "MANIQA": 0.3513},
        "text":         {"PI": 4.2674, "CLIPIQA": 0.6326, "MANIQA": 0.4019},
        "urban":        {"PI": 3.2238, "CLIPIQA": 0.6262, "MANIQA": 0.4051},
    },
    "IPIU": {
        "animals":      {"PI": 6.3996, "CLIPIQA": 0.4199, "MANIQA": 0.2923},
        "architecture": {"PI": 5.4120, "CLIPIQA": 0.3815, "MANIQA": 0.2952},
        "art":          {"PI": 6.3712, "CLIPIQA": 0.3925, "MANIQA": 0.2690},
        "food":         {"PI": 6.1494, "CLIPIQA": 0.3894, "MANIQA": 0.2369},
        "nature":       {"PI": 5.7130, "CLIPIQA": 0.4077, "MANIQA": 0.2850},
        "objects":      {"PI": 5.9424, "CLIPIQA": 0.4136, "MANIQA": 0.2724},
        "portraits":    {"PI": 6.2422, "CLIPIQA": 0.4062, "MANIQA": 0.2662},
        "sports":       {"PI": 6.5130, "CLIPIQA": 0.3974, "MANIQA": 0.2570},
        "text":         {"PI": 6.2766, "CLIPIQA": 0.4132, "MANIQA": 0.2886},
        "urban":        {"PI": 5.6584, "CLIPIQA": 0.3296, "MANIQA": 0.2593},
    },
    "BSRGAN": {
        "animals":      {"PI": 4.1098, "CLIPIQA": 0.5993, "MANIQA": 0.3199},
        "architecture": {"PI": 3.7090, "CLIPIQA": 0.5750, "MANIQA": 0.3856},
        "art":          {"PI": 4.4004, "CLIPIQA": 0.5882, "MANIQA": 0.3132},
        "food":         {"PI": 4.5946, "CLIPIQA": 0.5495, "MANIQA": 0.2912},
        "nature":       {"PI": 3.6012, "CLIPIQA": 0.5904, "MANIQA": 0.3101},
        "objects":      {"PI": 4.0920, "CLIPIQA": 0.5668, "MANIQA": 0.3415},
        "portraits":    {"PI": 4.2946, "CLIPIQA": 0.5970, "MANIQA": 0.3256},
        "sports":       {"PI": 4.7294, "CLIPIQA": 0.5897, "MANIQA": 0.3397},
        "text":         {"PI": 4.8254, "CLIPIQA": 0.5795, "MANIQA": 0.3674},
        "urban":        {"PI": 3.7566, "CLIPIQA": 0.5440, "MANIQA": 0.3566},
    },
    "SPAN": {
        "animals":      {"PI": 6.3950, "CLIPIQA": 0.4180, "MANIQA": 0.2952},
        "architecture": {"PI": 5.4864, "CLIPIQA": 0.3943, "MANIQA": 0.3002},
        "art":          {"PI": 6.3970, "CLIPIQA": 0.3910, "MANIQA": 0.2703},
        "food":         {"PI": 6.2188, "CLIPIQA": 0.3908, "MANIQA": 0.2380},
        "nature":       {"PI": 5.7620, "CLIPIQA": 0.4040, "MANIQA": 0.2864},
        "objects":      {"PI": 6.0010, "CLIPIQA": 0.4176, "MANIQA": 0.2748},
        "portraits":    {"PI": 6.3114, "CLIPIQA": 0.4147, "MANIQA": 0.2690},
        "sports":       {"PI": 6.5666, "CLIPIQA": 0.4007, "MANIQA": 0.2599},
        "text":         {"PI": 6.3116, "CLIPIQA": 0.4257, "MANIQA": 0.2906},
        "urban":        {"PI": 5.7486, "CLIPIQA": 0.3392, "MANIQA": 0.2633},
    },
    "R2NET": {
        "animals":      {"PI": 6.9088, "CLIPIQA": 0.3869, "MANIQA": 0.3033},
        "architecture": {"PI": 6.1674, "CLIPIQA": 0.3935, "MANIQA": 0.3098},
        "art":          {"PI": 6.8458, "CLIPIQA": 0.3638, "MANIQA": 0.2682},
        "food":         {"PI": 6.8612, "CLIPIQA": 0.3361, "MANIQA": 0.2476},
        "nature":       {"PI": 6.5912, "CLIPIQA": 0.3761, "MANIQA": 0.2855},
        "objects":      {"PI": 6.5486, "CLIPIQA": 0.3880, "MANIQA": 0.2831},
        "portraits":    {"PI": 6.8230, "CLIPIQA": 0.3829, "MANIQA": 0.2831},
        "sports":       {"PI": 6.9994, "CLIPIQA": 0.3692, "MANIQA": 0.2659},
        "text":         {"PI": 6.7734, "CLIPIQA": 0.4265, "MANIQA": 0.2996},
        "urban":        {"PI": 6.3162, "CLIPIQA": 0.3268, "MANIQA": 0.2646},
    },
}

# method -> metric -> (mean, median, sample std) over the ten class values
PSR4K_CLASS_SUMMARY = {
    "Real-ESRGAN": {"PI": (4.1444, 4.2236, 0.5269),
                    "CLIPIQA": (0.5302, 0.5373, 0.0389),
                    "MANIQA": (0.3283, 0.3253, 0.0294)},
    "VPEG":        {"PI": (3.1207, 3.0669, 0.2486),
                    "CLIPIQA": (0.6544, 0.6537, 0.0166),
                    "MANIQA": (0.3920, 0.3891, 0.0307)},
    "MiAlgo":      {"PI": (3.7421, 3.6629, 0.4080),
                    "CLIPIQA": (0.5999, 0.6085, 0.0530),
                    "MANIQA": (0.3662, 0.3637, 0.0414)},
    "IPIU":        {"PI": (6.0678, 6.1958, 0.3682),
                    "CLIPIQA": (0.3951, 0.4018, 0.0260),
                    "MANIQA": (0.2722, 0.2707, 0.0184)},
    "BSRGAN":      {"PI": (4.2113, 4.2022, 0.4335),
                    "CLIPIQA": (0.5779, 0.5838, 0.0192),
                    "MANIQA": (0.3351, 0.3327, 0.0288)},
    "SPAN":        {"PI": (6.1198, 6.2651, 0.3522),
                    "CLIPIQA": (0.3996, 0.4023, 0.0245),
                    "MANIQA": (0.2748, 0.2725, 0.0189)},
    "R2NET":       {"PI": (6.6835, 6.7982, 0.2716),
                    "CLIPIQA": (0.3750, 0.3795, 0.0286),
                    "MANIQA": (0.2811, 0.2831, 0.0197)},
}
