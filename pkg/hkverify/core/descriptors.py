# descriptors.py
#
# This file is part of hkverify: certified simulation and consensus verification
# for bounded-confidence opinion dynamics.
#
#    Copyright (c) 2024 and later, the hkverify developers
#    All rights reserved.
#
#    This source code is licensed under the BSD-style license found in the
#    LICENSE file in the root directory of this source tree.
############################################################################

from typing import Any, Generic, Type, TypeVar

TargetType = TypeVar("TargetType")


class ReadOnlyProperty(Generic[TargetType]):
    """
    Descriptor for attributes fixed at construction (stored in xxx._name). Profiles,
    envelopes and certificates are immutable; assigning raises AttributeError.
    """

    def __init__(self, target_type: Type[TargetType], doc: str = "") -> None:
        self.target_type = target_type
        self.__doc__ = doc

    def __set_name__(self, owner: Any, name: str) -> None:
        self.public_name = name
        self.name = "_" + name

    def __get__(self, instance: Any, *args, **kwargs) -> TargetType:
        if instance is None:  # accessed on class level
            return self  # type:ignore
        return instance.__dict__[self.name]

    def __set__(self, instance: Any, value: Any) -> None:
        raise AttributeError(
            "'{}' is read-only, construct a new {} instead".format(
                self.public_name, type(instance).__name__
            )
        )
