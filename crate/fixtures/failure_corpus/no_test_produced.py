from src.tcs import MockRoom


def make_room(initial_temp):
    return MockRoom(10, 1, 1, initial_temp=initial_temp)
