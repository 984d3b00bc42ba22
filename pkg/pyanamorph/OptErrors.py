class OpticsError(ValueError):
    """Domain failure with a stable code and key=value details."""

    code = "optics_error"

    def __init__(self, message=None, **details):
        if message is None:
            message = self.code
        ValueError.__init__(self, message)
        self.details = details

    def diagnostic(self):
        parts = ["error=%s" % self.code]
        for key in sorted(self.details):
            value = self.details[key]
            if isinstance(value, float):
                value = "%.6g" % value
            parts.append("%s=%s" % (key, value))
        return " ".join(parts)


class NoHit(OpticsError):
    code = "no_hit"


class TotalInternalReflection(OpticsError):
    code = "total_internal_reflection"


class NoTableHit(OpticsError):
    code = "no_table_hit"


class NoSolution(OpticsError):
    code = "no_solution"


class DegenerateChiefRay(OpticsError):
    code = "degenerate_chief_ray"


class DegenerateParameter(OpticsError):
    code = "degenerate_parameter"


class NoDegeneracy(OpticsError):
    code = "no_degeneracy"


class ApertureOcclusion(OpticsError):
    code = "aperture_occlusion"


class RegionOverflow(OpticsError):
    code = "region_overflow"


class DoesNotFit(OpticsError):
    code = "does_not_fit"


class NoChiefRay(OpticsError):
    code = "no_chief_ray"


class OutsideSnellsWindow(OpticsError):
    code = "outside_snells_window"


class ConfigError(OpticsError):
    code = "config"


class UsageError(OpticsError):
    code = "usage"
