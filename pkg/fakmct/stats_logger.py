from collections import defaultdict


class StatsLogger:
    def __init__(self):
        self._values = {
            "art_epochs": 0,
            "art_commits": 0,
            "art_resets": 0,
            "art_rejects": 0,
            "kmeans_fits": 0,
            "kmeans_passes": 0,
            "kmeans_repairs": 0,
            "kmeans_k_reduced": 0,
            "cell_merges": 0,
        }
        self._max_values = {
            "art_max_weight_change": 0.0,
            "art_categories": 0,
        }

        self._cumulative_values = {
            "kmeans_passes_per_k": defaultdict(int),
        }

        self._keys = list(self._values) + list(self._max_values) + list(self._cumulative_values)

    def log_cumulative_value(self, name, key, value):
        self._cumulative_values[name][key] += value

    def log_event(self, name, count=1):
        self._values[name] += count

    def log_max_value(self, name, value):
        self._max_values[name] = max(self._max_values[name], value)

    def merge(self, other):
        for k, v in other._values.items():
            self._values[k] += v
        for k, v in other._max_values.items():
            self._max_values[k] = max(self._max_values[k], v)
        for name, values in other._cumulative_values.items():
            for k, v in values.items():
                self._cumulative_values[name][k] += v

    def get_stats_dict(self):
        ret = dict()
        ret.update(self._values)
        ret.update(self._max_values)
        ret.update({k: {str(key): v[key] for key in sorted(v)} for k, v in self._cumulative_values.items()})
        assert sorted(ret) == sorted(self._keys)
        return ret
