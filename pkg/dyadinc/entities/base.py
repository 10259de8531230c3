class BaseFamily(object):
    """Immutable, typed, deduplicated and canonically ordered collection of dyadic objects.

    Properties

        scale : `dyadinc.dyadic.Scale`
            The scale shared by every member.
        values : `tuple`
            The members in canonical order.
    """

    _type = object

    def __init__(self, scale, values: list = [], key = lambda x: x.sort_key()):
        self._key = key
        self.scale = scale
        members = set()
        for value in values:
            if not isinstance(value, self._type):
                raise TypeError('Expected data of type {}, got {} instead.'.format(self._type.__name__, value.__class__.__name__))
            self._check(value)
            members.add(value)
        self._members = frozenset(members)
        self._values = tuple(sorted(members, key=self._key))


    def _check(self, value):
        pass


    def __len__(self):
        return len(self._values)


    def __getitem__(self, index):
        return self._values[index]


    def __iter__(self):
        for value in self._values:
            yield value


    def __contains__(self, value):
        return value in self._members


    def __eq__(self, other):
        if not isinstance(other, self.__class__):
            return False
        return self.scale == other.scale and self._members == other._members


    def __hash__(self):
        return hash((self.__class__.__name__, self.scale, self._members))


    def __repr__(self):
        return '{}({}, {})'.format(self.__class__.__name__, self.scale, list(self._values))


    @property
    def values(self):
        return self._values


    def issubset(self, other):
        return self._members <= other._members


    def derive(self, values):
        """A family of the same kind and scale holding `values`."""

        return self.__class__(self.scale, values)


    def union(self, other):
        return self.derive(list(self._values) + list(other))


    def difference(self, other):
        return self.derive([v for v in self._values if v not in other])
