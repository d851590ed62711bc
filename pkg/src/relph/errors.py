"""Exception hierarchy shared by every relph module."""


class RelphError(ValueError):
    """Base class for all input/contract errors raised by relph."""


class EmptySubcloudError(RelphError):
    def __init__(self, species):
        self.species = species
        super().__init__(f"no points labeled {species!r} in the point cloud")


class IdenticalSpeciesError(RelphError):
    pass


class DuplicatePointError(RelphError):
    pass


class DegenerateGeometryError(RelphError):
    """Too few points, or all points collinear."""


class NotSymmetricError(RelphError):
    pass


class MissingFaceError(RelphError):
    pass


class ZeroWitnessError(RelphError):
    def __init__(self, species=None):
        self.species = species
        what = f"species {species!r}" if species is not None else "the witness set"
        super().__init__(f"{what} witnesses no simplex of the landmark triangulation")


class DimensionMismatchError(RelphError):
    pass


class InvalidSpecError(RelphError):
    pass


class UnknownSpeciesError(RelphError):
    pass
